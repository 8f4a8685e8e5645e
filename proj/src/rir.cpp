#include "nctf/rir.hpp"

#include <cmath>
#include <numbers>
#include <numeric>
#include <string>

#include "nctf/error.hpp"
#include "nctf/random.hpp"

namespace nctf {

void RirSpec::validate() const {
  if (!(t60 > 0.0) || !std::isfinite(t60)) throw Error(Errc::InvalidSpec, "t60 must be > 0");
  if (!std::isfinite(drr_db)) throw Error(Errc::InvalidSpec, "drr_db must be finite");
  if (length < 2) throw Error(Errc::InvalidSpec, "length must be >= 2");
  if (sample_rate_hz <= 0) throw Error(Errc::InvalidSpec, "sample rate must be positive");
}

Signal synthesize_rir(const RirSpec& spec) {
  spec.validate();
  Signal rir;
  rir.sample_rate_hz = spec.sample_rate_hz;
  rir.samples.assign(spec.length, 0.0);
  rir.samples[0] = 1.0;

  Rng rng(spec.seed);
  const double decay = 3.0 * std::numbers::ln10 / (spec.sample_rate_hz * spec.t60);
  double tail_energy = 0.0;
  for (std::size_t n = 1; n < spec.length; ++n) {
    const double v = rng.normal() * std::exp(-decay * static_cast<double>(n));
    rir.samples[n] = v;
    tail_energy += v * v;
  }
  if (!(tail_energy > 0.0)) throw Error(Errc::InvalidSpec, "degenerate reverberant tail");
  const double scale = std::sqrt(std::pow(10.0, -spec.drr_db / 10.0) / tail_energy);
  for (std::size_t n = 1; n < spec.length; ++n) rir.samples[n] *= scale;
  return rir;
}

double measure_drr_db(std::span<const double> rir) {
  if (rir.size() < 2) throw Error(Errc::InvalidSpec, "RIR needs at least two samples");
  const double direct = rir[0] * rir[0];
  const double tail = std::inner_product(rir.begin() + 1, rir.end(), rir.begin() + 1, 0.0);
  return 10.0 * std::log10(direct / tail);
}

double fitted_decay_slope_db_per_s(std::span<const double> rir, int sample_rate_hz,
                                   double fit_seconds) {
  const auto block = static_cast<std::size_t>(std::max(1, sample_rate_hz / 100));
  std::vector<double> times, levels;
  for (std::size_t start = 1; start + block <= rir.size(); start += block) {
    const double centre = (static_cast<double>(start) + 0.5 * static_cast<double>(block - 1)) /
                          sample_rate_hz;
    if (centre > fit_seconds) break;
    double e = 0.0;
    for (std::size_t n = start; n < start + block; ++n) e += rir[n] * rir[n];
    if (e <= 0.0) continue;
    times.push_back(centre);
    levels.push_back(10.0 * std::log10(e / static_cast<double>(block)));
  }
  if (times.size() < 2) throw Error(Errc::InvalidSpec, "too few blocks to fit a decay");
  const double n = static_cast<double>(times.size());
  const double mt = std::accumulate(times.begin(), times.end(), 0.0) / n;
  const double ml = std::accumulate(levels.begin(), levels.end(), 0.0) / n;
  double cov = 0.0, var = 0.0;
  for (std::size_t i = 0; i < times.size(); ++i) {
    cov += (times[i] - mt) * (levels[i] - ml);
    var += (times[i] - mt) * (times[i] - mt);
  }
  return cov / var;
}

}  // namespace nctf
