#pragma once

#include <optional>

#include "nctf/types.hpp"

namespace nctf {

/// Sub-band RIR magnitudes, K x L_h.
struct RirModel {
  Matrix h;

  Eigen::Index bins() const noexcept { return h.rows(); }
  Eigen::Index taps() const noexcept { return h.cols(); }
};

struct SparsityConfig {
  double lambda = 0.0;
  bool auto_scale = true;

  /// 0.1 / (K T) * sum(y) when auto_scale is set, lambda otherwise.
  double resolve(const Matrix& y) const;
};

/// out(k, t) = sum_tau h(k, tau) s(k, t - tau); s is zero before frame 0 and
/// the output keeps the T columns of s.
Matrix rowwise_convolve(const Matrix& s, const RirModel& h);

/// out(k, t) = sum_{tau : t + tau < T} z(k, t + tau) h(k, tau). Adjoint of
/// rowwise_convolve in its first argument.
Matrix rowwise_correlate(const Matrix& z, const RirModel& h);

/// out(k, tau) = sum_{t >= tau} z(k, t) s(k, t - tau), K x taps.
Matrix lagged_products(const Matrix& z, const Matrix& s, Eigen::Index taps);

/// out(k, tau) = sum_{t < T - tau} s(k, t), K x taps.
Matrix shifted_row_sums(const Matrix& s, Eigen::Index taps);

/// out(k, t) = sum_{tau : t + tau < T} h(k, tau): the column sums of the
/// truncated convolution operator, i.e. rowwise_correlate(ones, h).
Matrix truncated_tap_sums(const RirModel& h, Eigen::Index frames);

/// Generalized KL divergence summed over all entries. Returns +infinity if
/// some y > 0 meets y_hat == 0; 0 log(0 / a) is taken as 0.
double kl_divergence(const Matrix& y, const Matrix& y_hat);

// Baseline N-CTF multiplicative updates. y_hat is rebuilt from the given
// parameters on every call.
RirModel baseline_update_h(const RirModel& h, const Matrix& s, const Matrix& y,
                           double eps = kDefaultEps);
Matrix baseline_update_s(const Matrix& s, const RirModel& h, const Matrix& y,
                         double lambda, double eps = kDefaultEps);

/// KL(y | h * s) + lambda * sum(s).
double baseline_cost(const Matrix& y, const Matrix& s, const RirModel& h, double lambda);

/// Divides every row of h by its first tap. When row_scale_into is given, row
/// k of that matrix is multiplied by the removed factor so that any model
/// product h * (M ...) is unchanged. Throws DegenerateFirstColumn if a first
/// tap is not strictly positive.
void normalize_rir(RirModel& h, Matrix* row_scale_into = nullptr);

/// Scales each basis column to sum to one. When col_scale_into is given, row r
/// of it (the activations) absorbs the factor so W X is unchanged. All-zero
/// columns are left untouched.
void normalize_basis(Matrix& w, Matrix* col_scale_into = nullptr);

/// Joint scale normalization: first taps of h become one and basis columns
/// sum to one. With a basis, the h scale is folded into its rows before the
/// columns are normalized, so h * (W X) is preserved up to the final column
/// rescale of W, which x_scale_into (if given) absorbs.
void normalize_scale(RirModel& h, Matrix* w, Matrix* x_scale_into = nullptr);

/// h(k, tau) <- min(h(k, tau), h(k, tau - 1)) scanning tau upward.
void clamp_decay(RirModel& h);

/// Every row is [1, (L-1)/L, ..., 1/L].
RirModel init_rir(Eigen::Index bins, Eigen::Index taps);

}  // namespace nctf
