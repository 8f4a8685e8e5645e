#include "nctf/integrated.hpp"

#include <string>

#include "engine_detail.hpp"
#include "nctf/error.hpp"
#include "nctf/nctf_core.hpp"

namespace nctf {

namespace {

void check_model(const RirModel& h, const Matrix& w, const Matrix& x, const Matrix& y) {
  if (w.rows() != y.rows() || h.bins() != y.rows() || x.cols() != y.cols() ||
      w.cols() != x.rows()) {
    throw Error(Errc::DimensionMismatch,
                "integrated model: y " + std::to_string(y.rows()) + "x" + std::to_string(y.cols()) +
                    ", h rows " + std::to_string(h.bins()) + ", W " + std::to_string(w.rows()) +
                    "x" + std::to_string(w.cols()) + ", X " + std::to_string(x.rows()) + "x" +
                    std::to_string(x.cols()));
  }
}

// A(k, t) = sum_tau h(k, tau) y(k, t + tau) / y_hat(k, t + tau)
Matrix back_projected_ratio(const RirModel& h, const Matrix& s_model, const Matrix& y,
                            double eps) {
  const Matrix y_hat = rowwise_convolve(s_model, h);
  const Matrix ratio = y.array() / (y_hat.array() + eps);
  return rowwise_correlate(ratio, h);
}

}  // namespace

RirModel integrated_update_h(const RirModel& h, const Matrix& w, const Matrix& x,
                             const Matrix& y, double eps) {
  check_model(h, w, x, y);
  return baseline_update_h(h, w * x, y, eps);
}

Matrix integrated_update_w(const Matrix& w, const RirModel& h, const Matrix& x, const Matrix& y,
                           double eps) {
  check_model(h, w, x, y);
  const Matrix a = back_projected_ratio(h, w * x, y, eps);
  const Matrix num = a * x.transpose();
  const Matrix den = truncated_tap_sums(h, y.cols()) * x.transpose();
  return w.array() * num.array() / (den.array() + eps);
}

Matrix integrated_update_x(const Matrix& x, const RirModel& h, const Matrix& w, const Matrix& y,
                           double lambda, double eps) {
  check_model(h, w, x, y);
  const Matrix a = back_projected_ratio(h, w * x, y, eps);
  const Matrix num = w.transpose() * a;
  const Matrix den = w.transpose() * truncated_tap_sums(h, y.cols());
  return x.array() * num.array() / (den.array() + lambda + eps);
}

Matrix integrated_gain(const RirModel& h, const Matrix& w, const Matrix& x, double eps) {
  const Matrix s = w * x;
  const Matrix y_hat = rowwise_convolve(s, h);
  return s.array() / (y_hat.array() + eps);
}

CostTerms integrated_cost(const Matrix& y, const RirModel& h, const Matrix& w, const Matrix& x,
                          double lambda) {
  const double kl = kl_divergence(y, rowwise_convolve(w * x, h));
  const double sparsity = lambda * x.sum();
  return {kl + sparsity, kl, sparsity};
}

namespace detail {

// Shared by the integrated and stacked sweeps.
void integrated_post_steps(IntegratedState& state, const EngineConfig& config) {
  if (config.pure_mode) return;
  state.rir.h.col(0) = state.rir.h.col(0).cwiseMax(config.eps);
  if (config.fixed_basis()) {
    normalize_rir(state.rir);
  } else {
    normalize_scale(state.rir, &state.nmf.w, &state.nmf.x);
  }
  clamp_decay(state.rir);
  if (config.phi_x != 1.0) state.nmf.x = state.nmf.x.array().pow(config.phi_x);
}

}  // namespace detail

void integrated_sweep(IntegratedState& state, const Matrix& y, const EngineConfig& config,
                      double lambda) {
  NmfModel& nmf = state.nmf;
  state.rir = integrated_update_h(state.rir, nmf.w, nmf.x, y, config.eps);
  if (!config.fixed_basis()) nmf.w = integrated_update_w(nmf.w, state.rir, nmf.x, y, config.eps);
  nmf.x = integrated_update_x(nmf.x, state.rir, nmf.w, y, lambda, config.eps);
  detail::integrated_post_steps(state, config);
}

IntegratedState integrated_initialize(const Matrix& y, const EngineConfig& config,
                                      const std::optional<Matrix>& fixed_basis) {
  if (config.fixed_basis() != fixed_basis.has_value()) {
    throw Error(Errc::InvalidConfig, config.fixed_basis()
                                         ? "variant needs a pre-trained basis"
                                         : "a fixed basis was given for the online variant");
  }
  IntegratedState state;
  state.rir = init_rir(y.rows(), config.lh);
  if (fixed_basis) {
    state.nmf.w = *fixed_basis;
    state.nmf.x = nmf_initialize_activations(y, state.nmf.w, config.seed);
    nmf_refine(y, state.nmf, config.nmf_init_iterations, false, config.eps);
  } else {
    state.nmf = nmf_initialize(y, config.rank, config.seed);
    nmf_refine(y, state.nmf, config.nmf_init_iterations, true, config.eps);
  }
  return state;
}

IntegratedResult run_integrated(const Matrix& y, const EngineConfig& config,
                                const std::optional<Matrix>& fixed_basis) {
  config.validate();
  const double lambda = config.resolve_lambda(y);
  IntegratedState state = integrated_initialize(y, config, fixed_basis);

  IntegratedResult result;
  result.lambda = lambda;
  result.report.total_name = "L1_cost";
  result.report.first_name = "kl_term";
  result.report.second_name = "sparsity_term";
  result.report.cost_trace.push_back(integrated_cost(y, state.rir, state.nmf.w, state.nmf.x, lambda));
  for (int it = 0; it < config.iterations; ++it) {
    integrated_sweep(state, y, config, lambda);
    result.report.cost_trace.push_back(
        integrated_cost(y, state.rir, state.nmf.w, state.nmf.x, lambda));
  }
  result.report.iterations_run = config.iterations;
  result.report.final_kl = result.report.cost_trace.back().first;
  result.gain = integrated_gain(state.rir, state.nmf.w, state.nmf.x, config.eps);
  result.model = std::move(state.nmf);
  result.rir = std::move(state.rir);
  return result;
}

}  // namespace nctf
