#pragma once

#include <filesystem>
#include <span>
#include <vector>

namespace nctf {

inline constexpr int kDefaultSampleRate = 16000;

/// Mono time-domain audio. Samples are nominally in [-1, 1].
struct Signal {
  std::vector<double> samples;
  int sample_rate_hz = kDefaultSampleRate;

  std::size_t size() const noexcept { return samples.size(); }
  double duration_s() const noexcept {
    return static_cast<double>(samples.size()) / sample_rate_hz;
  }
};

/// Reads a single-channel RIFF/WAVE file holding 16-bit PCM or 32-bit IEEE
/// float samples. PCM16 codes are scaled by 1/32768.
///
/// Throws Error with UnsupportedFormat, CorruptHeader or IoFailure.
Signal read_wav(const std::filesystem::path& path);

/// Writes 16-bit PCM mono. Samples outside [-1, 1) are clamped to the
/// nearest representable code before rounding.
///
/// Throws Error with NonFiniteSample or IoFailure.
void write_wav(const Signal& signal, const std::filesystem::path& path);

/// Throws SampleRateMismatch unless signal.sample_rate_hz == expected_hz.
void require_sample_rate(const Signal& signal, int expected_hz);

/// Full linear convolution, length len(s) + len(h) - 1.
Signal convolve_time(const Signal& signal, const Signal& rir);

// Raw-sample variant; uses FFT convolution for long inputs.
std::vector<double> convolve(std::span<const double> a, std::span<const double> b);

double energy(std::span<const double> x);

}  // namespace nctf
