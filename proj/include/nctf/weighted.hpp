#pragma once

#include <optional>

#include "nctf/config.hpp"
#include "nctf/nctf_core.hpp"
#include "nctf/nmf.hpp"

namespace nctf {

// Weighted model: L2 = rho P + (1 - rho) Q with
//   P = KL(s | W X) + lambda sum(x),  Q = KL(y | h * s) + lambda sum(s).

struct WeightedState {
  Matrix s;
  RirModel rir;
  NmfModel nmf;
  double rho = 0.75;
};

/// Per-entry coefficients of the s-surrogate derivative c / s + rho log s + b.
struct StationarityTerms {
  Matrix c;  // <= 0
  Matrix b;
};

StationarityTerms weighted_s_terms(const WeightedState& state, const Matrix& y,
                                   double lambda, double eps = kDefaultEps);

/// Root of c / s + rho log s + b = 0 for c <= 0. For c == 0 the limit
/// exp(-b / rho) is returned.
double solve_weighted_entry(double c, double b, double rho);

/// Lambert-W s update. c == 0 entries take exp(-b / rho), capped at max(W X).
Matrix weighted_update_s(const WeightedState& state, const Matrix& y, double lambda,
                         double eps = kDefaultEps);

/// Same rule as the baseline h update, driven by the explicit s estimate.
RirModel weighted_update_h(const RirModel& h, const Matrix& s, const Matrix& y,
                           double eps = kDefaultEps);
Matrix weighted_update_w(const Matrix& w, const Matrix& s, const Matrix& x,
                         double eps = kDefaultEps);
Matrix weighted_update_x(const Matrix& x, const Matrix& s, const Matrix& w, double lambda,
                         double eps = kDefaultEps);

/// G = s / (h * s).
Matrix weighted_gain(const Matrix& s, const RirModel& h, double eps = kDefaultEps);

/// {L2, P, Q}.
CostTerms weighted_cost(const Matrix& y, const WeightedState& state, double lambda);

/// h, s, w (skipped for a fixed basis), x; then in production mode the h scale
/// is folded into s, basis columns are normalized into x, h is clamped, and x
/// and s are raised to phi_x.
void weighted_sweep(WeightedState& state, const Matrix& y, const EngineConfig& config,
                    double lambda);

struct WeightedResult {
  Matrix gain;
  FitReport report;
  WeightedState state;
  double lambda = 0.0;
};

/// s starts at y, h at the linear decay, W and X from seeded NMF on y.
WeightedState weighted_initialize(const Matrix& y, const EngineConfig& config,
                                  const std::optional<Matrix>& fixed_basis);

/// Throws InvalidWeight unless 0 < rho < 1.
WeightedResult run_weighted(const Matrix& y, const EngineConfig& config,
                            const std::optional<Matrix>& fixed_basis = std::nullopt);

}  // namespace nctf
