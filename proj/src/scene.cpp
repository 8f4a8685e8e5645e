#include "nctf/scene.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>

#include "nctf/error.hpp"
#include "nctf/random.hpp"
#include "nctf/stft.hpp"

namespace nctf {
namespace {

double uniform_in(Rng& rng, double lo, double hi) { return lo + (hi - lo) * rng.uniform(); }

// Raised-cosine onset and offset.
double syllable_envelope(double t, double dur, double attack, double release) {
  if (t < attack) return 0.5 - 0.5 * std::cos(std::numbers::pi * t / attack);
  if (t > dur - release) {
    return 0.5 - 0.5 * std::cos(std::numbers::pi * std::max(0.0, dur - t) / release);
  }
  return 1.0;
}

void add_voiced(std::vector<double>& out, std::size_t start, std::size_t len, int fs, Rng& rng) {
  const double f0_start = uniform_in(rng, 100.0, 220.0);
  const double f0_end = f0_start * uniform_in(rng, 0.8, 1.2);
  std::array<double, 3> f_start{uniform_in(rng, 300.0, 800.0), uniform_in(rng, 900.0, 2200.0),
                                uniform_in(rng, 2400.0, 3000.0)};
  std::array<double, 3> f_end{};
  for (std::size_t i = 0; i < 3; ++i) f_end[i] = f_start[i] * uniform_in(rng, 0.85, 1.15);
  constexpr std::array<double, 3> kBandwidth{80.0, 120.0, 160.0};
  constexpr std::array<double, 3> kFormantGain{1.0, 0.6, 0.3};

  const double nyquist_guard = 0.45 * fs;
  const int max_harmonic = static_cast<int>(nyquist_guard / std::min(f0_start, f0_end));
  std::vector<double> phase(static_cast<std::size_t>(max_harmonic) + 1);
  for (auto& p : phase) p = uniform_in(rng, 0.0, 2.0 * std::numbers::pi);

  const double dur = static_cast<double>(len) / fs;
  for (std::size_t n = 0; n < len && start + n < out.size(); ++n) {
    const double t = static_cast<double>(n) / fs;
    const double frac = t / dur;
    const double f0 = f0_start + (f0_end - f0_start) * frac;
    double v = 0.0;
    for (int h = 1; h <= max_harmonic; ++h) {
      const double f = h * f0;
      auto& ph = phase[static_cast<std::size_t>(h)];
      ph += 2.0 * std::numbers::pi * f / fs;
      if (f >= nyquist_guard) continue;
      double amp = 0.02 / h;  // glottal tilt floor
      for (std::size_t i = 0; i < 3; ++i) {
        const double centre = f_start[i] + (f_end[i] - f_start[i]) * frac;
        const double x = (f - centre) / kBandwidth[i];
        amp += kFormantGain[i] / (1.0 + x * x);
      }
      v += amp * std::sin(ph);
    }
    out[start + n] += v * syllable_envelope(t, dur, 0.02, 0.04);
  }
}

void add_unvoiced(std::vector<double>& out, std::size_t start, std::size_t len, int fs,
                  Rng& rng) {
  const double gain = uniform_in(rng, 0.1, 0.3);
  const double dur = static_cast<double>(len) / fs;
  double prev = 0.0;
  for (std::size_t n = 0; n < len && start + n < out.size(); ++n) {
    const double w = rng.normal();
    const double hp = w - 0.9 * prev;  // tilts the burst toward high frequencies
    prev = w;
    out[start + n] += gain * hp * syllable_envelope(static_cast<double>(n) / fs, dur, 0.01, 0.02);
  }
}

}  // namespace

Signal synthesize_speech_like(double duration_s, std::uint64_t seed, int sample_rate_hz) {
  if (!(duration_s > 0.0) || sample_rate_hz <= 0) {
    throw Error(Errc::InvalidSpec, "duration and sample rate must be positive");
  }
  Signal sig;
  sig.sample_rate_hz = sample_rate_hz;
  const auto total = static_cast<std::size_t>(std::llround(duration_s * sample_rate_hz));
  sig.samples.assign(total, 0.0);
  Rng rng(seed);

  const auto samples_of = [&](double s) {
    return static_cast<std::size_t>(std::llround(s * sample_rate_hz));
  };
  std::size_t pos = samples_of(uniform_in(rng, 0.1, 0.2));
  const std::size_t stop = total > samples_of(0.3) ? total - samples_of(0.3) : 0;
  while (pos < stop) {
    if (rng.uniform() < 0.8) {
      const std::size_t len = samples_of(uniform_in(rng, 0.12, 0.3));
      add_voiced(sig.samples, pos, len, sample_rate_hz, rng);
      pos += len;
    } else {
      const std::size_t len = samples_of(uniform_in(rng, 0.08, 0.15));
      add_unvoiced(sig.samples, pos, len, sample_rate_hz, rng);
      pos += len;
    }
    pos += samples_of(uniform_in(rng, 0.05, 0.25));
  }

  double peak = 0.0;
  for (double v : sig.samples) peak = std::max(peak, std::abs(v));
  const double scale = peak > 0.0 ? 0.5 / peak : 1.0;
  for (double& v : sig.samples) v *= scale;
  // Low noise floor so that silent stretches are not digitally zero.
  for (double& v : sig.samples) v += 0.5e-3 * rng.normal();
  peak = 0.0;
  for (double v : sig.samples) peak = std::max(peak, std::abs(v));
  for (double& v : sig.samples) v *= 0.5 / peak;
  return sig;
}

std::vector<double> speech_shaped_noise(const Signal& shape_source, std::size_t length,
                                        std::uint64_t seed) {
  const StftConfig config{512, 256, 1};
  const auto source = stft_forward(shape_source, config);
  Vector ltas = source.coeffs.cwiseAbs2().rowwise().mean().cwiseSqrt();
  const double mean_level = ltas.mean();
  if (!(mean_level > 0.0)) throw Error(Errc::InvalidSpec, "shape source is silent");
  ltas /= mean_level;

  Rng rng(seed);
  Signal white;
  white.sample_rate_hz = shape_source.sample_rate_hz;
  white.samples.resize(std::max(length, config.frame_len));
  for (double& v : white.samples) v = rng.normal();
  const auto spec = stft_forward(white, config);
  const Matrix gain = ltas.replicate(1, spec.frames());
  auto shaped = apply_gain_and_synthesize(spec, gain, 1).samples;
  shaped.resize(length);
  return shaped;
}

std::vector<double> scale_to_snr(std::span<const double> signal, std::span<const double> noise,
                                 double snr_db) {
  const double es = energy(signal);
  const double en = energy(noise);
  if (!(en > 0.0)) throw Error(Errc::InvalidSpec, "noise has zero energy");
  const double factor = std::sqrt(es / (en * std::pow(10.0, snr_db / 10.0)));
  std::vector<double> out(noise.begin(), noise.end());
  for (double& v : out) v *= factor;
  return out;
}

}  // namespace nctf
