#pragma once

#include <optional>

#include "nctf/config.hpp"
#include "nctf/nctf_core.hpp"
#include "nctf/nmf.hpp"

namespace nctf {

// Integrated model: y ~ h * (W X), cost KL(y | h * (W X)) + lambda sum(x).
// The update functions accept any h with as many rows as W, which is how the
// frame-stacked engine reuses them with a replicated h.

RirModel integrated_update_h(const RirModel& h, const Matrix& w, const Matrix& x,
                             const Matrix& y, double eps = kDefaultEps);
Matrix integrated_update_w(const Matrix& w, const RirModel& h, const Matrix& x,
                           const Matrix& y, double eps = kDefaultEps);
Matrix integrated_update_x(const Matrix& x, const RirModel& h, const Matrix& w,
                           const Matrix& y, double lambda, double eps = kDefaultEps);

/// G = (W X) / (h * (W X)).
Matrix integrated_gain(const RirModel& h, const Matrix& w, const Matrix& x,
                       double eps = kDefaultEps);

/// {L1, KL term, sparsity term}.
CostTerms integrated_cost(const Matrix& y, const RirModel& h, const Matrix& w,
                          const Matrix& x, double lambda);

struct IntegratedState {
  RirModel rir;
  NmfModel nmf;
};

/// One pass of h, w (skipped for a fixed basis), x; followed in production
/// mode by normalize_scale, clamp_decay and x <- x^phi_x.
void integrated_sweep(IntegratedState& state, const Matrix& y, const EngineConfig& config,
                      double lambda);

struct IntegratedResult {
  Matrix gain;
  FitReport report;
  NmfModel model;
  RirModel rir;
  double lambda = 0.0;

  /// Direct clean-spectrogram estimate W X.
  Matrix direct_estimate() const { return model.product(); }
};

/// Initial state: linearly decaying h; W, X seeded then refined by
/// config.nmf_init_iterations standard NMF sweeps on y (W fixed when given).
IntegratedState integrated_initialize(const Matrix& y, const EngineConfig& config,
                                      const std::optional<Matrix>& fixed_basis);

/// Full integrated method. fixed_basis is required iff the basis mode is not
/// online; its row count must equal the bin count of y.
IntegratedResult run_integrated(const Matrix& y, const EngineConfig& config,
                                const std::optional<Matrix>& fixed_basis = std::nullopt);

}  // namespace nctf
