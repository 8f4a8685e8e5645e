#pragma once

#include "nctf/config.hpp"
#include "nctf/nctf_core.hpp"

namespace nctf {

struct BaselineResult {
  Matrix gain;  // s / y: the estimate with the reverberant phase
  FitReport report;
  Matrix s;
  RirModel rir;
  double lambda = 0.0;
};

/// Baseline N-CTF estimation without a spectral model: s starts at y, h at
/// the linear decay; each sweep updates h then s. Production mode normalizes
/// h (scale folded into s) and clamps its decay.
BaselineResult run_baseline(const Matrix& y, const EngineConfig& config);

}  // namespace nctf
