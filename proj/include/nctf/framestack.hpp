#pragma once

#include <optional>

#include "nctf/config.hpp"
#include "nctf/integrated.hpp"

namespace nctf {

/// (K T_st) x T matrix whose column t stacks base columns t .. t + T_st - 1
/// (zero past the last frame).
struct StackedSpectrogram {
  Matrix values;
  int t_st = 1;
  Eigen::Index base_k = 0;

  /// Rows of block l (0-based), i.e. base frame t + l in column t.
  auto block(int l) const { return values.middleRows(l * base_k, base_k); }
};

/// Throws InvalidWindow if t_st < 1.
StackedSpectrogram stack(const Matrix& spec, int t_st);

/// h_st: t_st vertical copies of h.
RirModel replicate_rir(const RirModel& h, int t_st);

/// h update summing numerator and denominator over the t_st blocks.
RirModel stacked_update_h(const RirModel& h, const Matrix& w_st, const Matrix& x,
                          const Matrix& y_st, int t_st, double eps = kDefaultEps);

/// G(k, t) = sum_l (W X)(f_l, t) / sum_l (h_st * (W X))(f_l, t), f_l = k + K l.
Matrix stacked_gain(const RirModel& h, const Matrix& w_st, const Matrix& x, int t_st,
                    double eps = kDefaultEps);

/// {cost, KL term, sparsity term} of the stacked integrated model.
CostTerms stacked_cost(const Matrix& y_st, const RirModel& h, const Matrix& w_st,
                       const Matrix& x, int t_st, double lambda);

/// h (stacked rule), then w and x with the integrated rules on replicated h;
/// production post-steps as in integrated_sweep.
void stacked_sweep(IntegratedState& state, const Matrix& y_st, int t_st,
                   const EngineConfig& config, double lambda);

/// Integrated method on the stacked spectrogram. lambda is resolved from the
/// unstacked y. A fixed basis must have K * t_st rows.
IntegratedResult run_stacked(const Matrix& y, const EngineConfig& config,
                             const std::optional<Matrix>& fixed_basis = std::nullopt);

}  // namespace nctf
