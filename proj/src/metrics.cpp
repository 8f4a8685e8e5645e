#include "nctf/metrics.hpp"

#include <cmath>
#include <complex>
#include <cstdio>
#include <numbers>
#include <ostream>
#include <string>

#include "nctf/error.hpp"
#include "nctf/fft.hpp"
#include "nctf/nctf_core.hpp"

namespace nctf {

double log_spectral_distance(const Matrix& a, const Matrix& b, double floor_db) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw Error(Errc::DimensionMismatch, "log_spectral_distance operands differ in shape");
  }
  if (a.size() == 0) return 0.0;
  const double peak = std::max(a.maxCoeff(), b.maxCoeff());
  if (!(peak > 0.0)) return 0.0;
  const double delta = std::pow(10.0, floor_db / 20.0) * peak;

  double mean_sq_over_frames = 0.0;
  for (Eigen::Index t = 0; t < a.cols(); ++t) {
    const auto ratio = (a.col(t).array() + delta) / (b.col(t).array() + delta);
    const double frame_ms = (20.0 * ratio.log10()).square().mean();
    mean_sq_over_frames += frame_ms;  // per-frame RMS, squared
  }
  return std::sqrt(mean_sq_over_frames / static_cast<double>(a.cols()));
}

double kl_fit(const Matrix& y, const Matrix& y_hat) {
  const double kl = kl_divergence(y, y_hat);
  const double mass = y.sum();
  return mass > 0.0 ? kl / mass : kl;
}

std::vector<double> frame_cepstrum(const std::vector<double>& frame, int order) {
  RealFft fft(frame.size());
  std::vector<std::complex<double>> spec(fft.bins());
  fft.forward(frame, spec);
  // Only digital silence reaches the floor, so a constant gain still shifts
  // nothing but c[0].
  constexpr double kFloor = 1e-300;
  for (auto& v : spec) v = std::log(std::max(std::abs(v), kFloor));
  std::vector<double> cep(frame.size());
  fft.inverse(spec, cep);
  cep.resize(static_cast<std::size_t>(order) + 1);
  return cep;
}

double cepstral_distance(const Signal& ref, const Signal& test, const CepstralConfig& config) {
  require_sample_rate(test, ref.sample_rate_hz);
  if (ref.size() != test.size()) {
    throw Error(Errc::LengthMismatch, std::to_string(ref.size()) + " vs " +
                                          std::to_string(test.size()) + " samples");
  }
  if (config.order < 1 || static_cast<std::size_t>(config.order) >= config.frame_len / 2) {
    throw Error(Errc::InvalidConfig, "cepstral order out of range");
  }
  const std::size_t len = config.frame_len;
  const std::size_t hop = len / 2;
  std::vector<double> window(len);
  for (std::size_t n = 0; n < len; ++n) {
    window[n] = 0.5 - 0.5 * std::cos(2.0 * std::numbers::pi * static_cast<double>(n) /
                                     static_cast<double>(len));
  }

  const std::size_t frames = ref.size() < len ? 1 : (ref.size() - len) / hop + 1;
  auto frame_at = [&](const Signal& sig, std::size_t t) {
    std::vector<double> f(len, 0.0);
    for (std::size_t n = 0; n < len && t * hop + n < sig.size(); ++n) {
      f[n] = sig.samples[t * hop + n] * window[n];
    }
    return f;
  };

  std::vector<double> ref_energy(frames);
  double max_energy = 0.0;
  for (std::size_t t = 0; t < frames; ++t) {
    ref_energy[t] = energy(frame_at(ref, t));
    max_energy = std::max(max_energy, ref_energy[t]);
  }
  if (!(max_energy > 0.0)) return 0.0;
  const double threshold = max_energy * std::pow(10.0, -config.active_range_db / 10.0);

  const double scale = 10.0 / std::numbers::ln10 * std::numbers::sqrt2;
  double total = 0.0;
  std::size_t active = 0;
  for (std::size_t t = 0; t < frames; ++t) {
    if (ref_energy[t] < threshold || ref_energy[t] <= 0.0) continue;
    const auto c_ref = frame_cepstrum(frame_at(ref, t), config.order);
    const auto c_test = frame_cepstrum(frame_at(test, t), config.order);
    double sum_sq = 0.0;
    for (int n = 1; n <= config.order; ++n) {
      const double d = c_ref[static_cast<std::size_t>(n)] - c_test[static_cast<std::size_t>(n)];
      sum_sq += d * d;
    }
    total += scale * std::sqrt(sum_sq);
    ++active;
  }
  return active > 0 ? total / static_cast<double>(active) : 0.0;
}

void write_metric_csv_header(std::ostream& os) { os << "file,method,kl_fit,lsd_db,cd\n"; }

void write_metric_csv_row(std::ostream& os, const MetricReport& row) {
  char buf[128];
  std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g", row.kl_fit, row.lsd_db, row.cd);
  os << row.file << ',' << row.method << ',' << buf << '\n';
}

}  // namespace nctf
