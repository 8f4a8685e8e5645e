#include "nctf/stft.hpp"

#include <cmath>
#include <numbers>

#include "nctf/error.hpp"
#include "nctf/fft.hpp"

namespace nctf {

StftConfig StftConfig::from_ms(double frame_ms, int sample_rate_hz, int power_p) {
  if (!(frame_ms > 0.0)) throw Error(Errc::InvalidConfig, "frame length must be positive");
  auto frame = static_cast<std::size_t>(std::lround(frame_ms * 1e-3 * sample_rate_hz));
  frame += frame % 2;
  StftConfig config{frame, frame / 2, power_p};
  config.validate();
  return config;
}

void StftConfig::validate() const {
  if (frame_len < 2 || frame_len % 2 != 0) {
    throw Error(Errc::InvalidConfig, "frame length must be even and at least 2");
  }
  if (hop != frame_len / 2) throw Error(Errc::InvalidConfig, "hop must be half the frame length");
  if (power_p != 1 && power_p != 2) throw Error(Errc::InvalidConfig, "power must be 1 or 2");
}

std::vector<double> sqrt_hann(std::size_t frame_len) {
  std::vector<double> w(frame_len);
  const double n = static_cast<double>(frame_len);
  for (std::size_t i = 0; i < frame_len; ++i) {
    w[i] = std::sin(std::numbers::pi * (static_cast<double>(i) + 0.5) / n);
  }
  return w;
}

std::size_t frame_count(std::size_t len, const StftConfig& config) {
  if (len <= config.frame_len) return 1;
  return (len - config.frame_len + config.hop - 1) / config.hop + 1;
}

ComplexSpectrogram stft_forward(const Signal& signal, const StftConfig& config) {
  config.validate();
  if (signal.size() < config.frame_len) {
    throw Error(Errc::SignalTooShort, std::to_string(signal.size()) + " samples, frame is " +
                                          std::to_string(config.frame_len));
  }
  const std::size_t frames = frame_count(signal.size(), config);
  const auto window = sqrt_hann(config.frame_len);

  ComplexSpectrogram out;
  out.config = config;
  out.original_len = signal.size();
  out.sample_rate_hz = signal.sample_rate_hz;
  out.coeffs.resize(static_cast<Eigen::Index>(config.bins()), static_cast<Eigen::Index>(frames));

  RealFft fft(config.frame_len);
  std::vector<double> buf(config.frame_len);
  std::vector<std::complex<double>> spec(config.bins());
  for (std::size_t t = 0; t < frames; ++t) {
    const std::size_t offset = t * config.hop;
    for (std::size_t n = 0; n < config.frame_len; ++n) {
      const std::size_t idx = offset + n;
      buf[n] = idx < signal.size() ? signal.samples[idx] * window[n] : 0.0;
    }
    fft.forward(buf, spec);
    for (std::size_t k = 0; k < spec.size(); ++k) {
      out.coeffs(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(t)) = spec[k];
    }
  }
  return out;
}

Spectrogram magnitude(const ComplexSpectrogram& spec) {
  Spectrogram out;
  out.power_p = spec.config.power_p;
  out.values = spec.coeffs.cwiseAbs();
  if (out.power_p == 2) out.values = out.values.array().square();
  return out;
}

Signal apply_gain_and_synthesize(const ComplexSpectrogram& spec, const Matrix& gain,
                                 int power_p) {
  if (gain.rows() != spec.bins() || gain.cols() != spec.frames()) {
    throw Error(Errc::DimensionMismatch, "gain is " + std::to_string(gain.rows()) + "x" +
                                             std::to_string(gain.cols()) + ", spectrogram is " +
                                             std::to_string(spec.bins()) + "x" +
                                             std::to_string(spec.frames()));
  }
  if (power_p != 1 && power_p != 2) throw Error(Errc::InvalidConfig, "power must be 1 or 2");

  const StftConfig& config = spec.config;
  const auto window = sqrt_hann(config.frame_len);
  const std::size_t frames = static_cast<std::size_t>(spec.frames());
  const std::size_t span_len = (frames - 1) * config.hop + config.frame_len;

  std::vector<double> acc(span_len, 0.0);
  std::vector<double> norm(span_len, 0.0);

  RealFft fft(config.frame_len);
  std::vector<std::complex<double>> bins(config.bins());
  std::vector<double> buf(config.frame_len);
  for (std::size_t t = 0; t < frames; ++t) {
    for (std::size_t k = 0; k < bins.size(); ++k) {
      const auto kk = static_cast<Eigen::Index>(k);
      const auto tt = static_cast<Eigen::Index>(t);
      const double g = gain(kk, tt);
      const double scale = power_p == 1 ? g : std::sqrt(g);
      bins[k] = spec.coeffs(kk, tt) * scale;
    }
    fft.inverse(bins, buf);
    const std::size_t offset = t * config.hop;
    for (std::size_t n = 0; n < config.frame_len; ++n) {
      acc[offset + n] += buf[n] * window[n];
      norm[offset + n] += window[n] * window[n];
    }
  }

  Signal out;
  out.sample_rate_hz = spec.sample_rate_hz;
  out.samples.resize(spec.original_len);
  for (std::size_t i = 0; i < spec.original_len; ++i) out.samples[i] = acc[i] / norm[i];
  return out;
}

}  // namespace nctf
