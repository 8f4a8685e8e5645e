#pragma once

#include <cstdint>
#include <span>

#include "nctf/signal_io.hpp"

namespace nctf {

struct RirSpec {
  double t60 = 0.68;
  double drr_db = 0.0;
  std::size_t length = 16000;
  std::uint64_t seed = 1;
  int sample_rate_hz = kDefaultSampleRate;

  void validate() const;  // InvalidSpec
};

/// Unit direct path at sample 0 followed by Gaussian noise under the
/// amplitude envelope exp(-3 ln(10) n / (fs t60)), scaled so that
/// 10 log10(direct energy / tail energy) == drr_db.
Signal synthesize_rir(const RirSpec& spec);

/// Direct (sample 0) to tail energy ratio in dB.
double measure_drr_db(std::span<const double> rir);

/// Least-squares slope (dB/s) of the smoothed energy envelope, fitted over
/// the first fit_seconds of the tail.
double fitted_decay_slope_db_per_s(std::span<const double> rir, int sample_rate_hz,
                                   double fit_seconds);

}  // namespace nctf
