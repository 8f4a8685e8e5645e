#pragma once

#include <cstddef>
#include <vector>

#include <Eigen/Dense>

#include "nctf/signal_io.hpp"
#include "nctf/types.hpp"

namespace nctf {

/// Frame parameters. hop is always frame_len / 2; the square-root Hann
/// analysis/synthesis pair only reconstructs perfectly at 50% overlap.
struct StftConfig {
  std::size_t frame_len = 1024;
  std::size_t hop = 512;
  int power_p = 1;

  /// Frame length in milliseconds rounded to an even sample count.
  static StftConfig from_ms(double frame_ms, int sample_rate_hz, int power_p = 1);

  std::size_t bins() const noexcept { return frame_len / 2 + 1; }
  void validate() const;
};

struct ComplexSpectrogram {
  Eigen::MatrixXcd coeffs;  // K x T, one-sided
  StftConfig config;
  std::size_t original_len = 0;
  int sample_rate_hz = kDefaultSampleRate;

  Eigen::Index bins() const noexcept { return coeffs.rows(); }
  Eigen::Index frames() const noexcept { return coeffs.cols(); }
};

/// K x T matrix of |STFT|^p values.
struct Spectrogram {
  Matrix values;
  int power_p = 1;

  Eigen::Index bins() const noexcept { return values.rows(); }
  Eigen::Index frames() const noexcept { return values.cols(); }
};

/// sin(pi (n + 1/2) / N): the square root of a half-sample-shifted Hann
/// window. w^2(n) + w^2(n + N/2) == 1, and every tap is strictly positive.
std::vector<double> sqrt_hann(std::size_t frame_len);

/// Number of frames covering len samples when the tail is zero-padded up to
/// a full frame.
std::size_t frame_count(std::size_t len, const StftConfig& config);

/// Throws SignalTooShort if the signal is shorter than one frame.
ComplexSpectrogram stft_forward(const Signal& signal, const StftConfig& config);

Spectrogram magnitude(const ComplexSpectrogram& spec);

/// Scales each coefficient by gain^(1/p), keeps the reverberant phase, and
/// resynthesizes by windowed overlap-add. Output has original_len samples.
/// The overlap-add is normalized by the summed squared window, which is
/// one everywhere except in the first and last half frame.
Signal apply_gain_and_synthesize(const ComplexSpectrogram& spec, const Matrix& gain,
                                 int power_p);

}  // namespace nctf
