#include "nctf/weighted.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "nctf/error.hpp"
#include "nctf/lambert_w.hpp"
#include "nctf/parallel.hpp"

namespace nctf {

namespace {

void check_state(const WeightedState& state, const Matrix& y) {
  const Matrix& s = state.s;
  if (s.rows() != y.rows() || s.cols() != y.cols() || state.rir.bins() != y.rows() ||
      state.nmf.w.rows() != y.rows() || state.nmf.x.cols() != y.cols() ||
      state.nmf.w.cols() != state.nmf.x.rows()) {
    throw Error(Errc::DimensionMismatch, "weighted state does not match y " +
                                             std::to_string(y.rows()) + "x" +
                                             std::to_string(y.cols()));
  }
}

}  // namespace

StationarityTerms weighted_s_terms(const WeightedState& state, const Matrix& y, double lambda,
                                   double eps) {
  check_state(state, y);
  const double rho = state.rho;
  const Matrix y_hat = rowwise_convolve(state.s, state.rir);
  const Matrix ratio = y.array() / (y_hat.array() + eps);
  const Matrix back = rowwise_correlate(ratio, state.rir);
  const Matrix s_model = state.nmf.product();

  StationarityTerms terms;
  terms.c = -(1.0 - rho) * state.s.cwiseProduct(back);
  terms.b = (1.0 - rho) * (truncated_tap_sums(state.rir, y.cols()).array() + lambda) -
            rho * (s_model.array() + eps).log();
  return terms;
}

double solve_weighted_entry(double c, double b, double rho) {
  if (c >= 0.0) return std::exp(-b / rho);
  // With z = -c / (rho s): z + log z = log(-c / rho) + b / rho.
  const double a = std::log(-c / rho) + b / rho;
  const double z = lambert_w0_exp(a);
  if (std::isinf(z)) return 0.0;
  if (z >= 1e-100) return -c / (rho * z);
  // log s = z - b / rho stays accurate when z is tiny or underflows.
  return std::exp(z - b / rho);
}

Matrix weighted_update_s(const WeightedState& state, const Matrix& y, double lambda, double eps) {
  const StationarityTerms terms = weighted_s_terms(state, y, lambda, eps);
  const double rho = state.rho;
  const double cap = state.nmf.product().maxCoeff();
  Matrix out(y.rows(), y.cols());
  parallel_for(static_cast<std::size_t>(y.cols()), 16, [&](std::size_t begin, std::size_t end) {
    for (auto t = static_cast<Eigen::Index>(begin); t < static_cast<Eigen::Index>(end); ++t) {
      for (Eigen::Index k = 0; k < y.rows(); ++k) {
        const double c = terms.c(k, t);
        double s = solve_weighted_entry(c, terms.b(k, t), rho);
        if (c >= 0.0) s = std::min(s, cap);
        out(k, t) = s;
      }
    }
  });
  return out;
}

RirModel weighted_update_h(const RirModel& h, const Matrix& s, const Matrix& y, double eps) {
  return baseline_update_h(h, s, y, eps);
}

Matrix weighted_update_w(const Matrix& w, const Matrix& s, const Matrix& x, double eps) {
  if (w.rows() != s.rows() || x.cols() != s.cols() || w.cols() != x.rows()) {
    throw Error(Errc::DimensionMismatch, "weighted_update_w");
  }
  const Matrix ratio = s.array() / ((w * x).array() + eps);
  const Matrix num = ratio * x.transpose();
  const Eigen::RowVectorXd den = x.rowwise().sum().transpose();
  return w.array() * (num.array().rowwise() / (den.array() + eps));
}

Matrix weighted_update_x(const Matrix& x, const Matrix& s, const Matrix& w, double lambda,
                         double eps) {
  if (w.rows() != s.rows() || x.cols() != s.cols() || w.cols() != x.rows()) {
    throw Error(Errc::DimensionMismatch, "weighted_update_x");
  }
  const Matrix ratio = s.array() / ((w * x).array() + eps);
  const Matrix num = w.transpose() * ratio;
  const Vector den = w.colwise().sum().transpose();
  return x.array() * (num.array().colwise() / (den.array() + lambda + eps));
}

Matrix weighted_gain(const Matrix& s, const RirModel& h, double eps) {
  const Matrix y_hat = rowwise_convolve(s, h);
  return s.array() / (y_hat.array() + eps);
}

CostTerms weighted_cost(const Matrix& y, const WeightedState& state, double lambda) {
  check_state(state, y);
  const double p = kl_divergence(state.s, state.nmf.product()) + lambda * state.nmf.x.sum();
  const double q = baseline_cost(y, state.s, state.rir, lambda);
  return {state.rho * p + (1.0 - state.rho) * q, p, q};
}

void weighted_sweep(WeightedState& state, const Matrix& y, const EngineConfig& config,
                    double lambda) {
  state.rir = weighted_update_h(state.rir, state.s, y, config.eps);
  state.s = weighted_update_s(state, y, lambda, config.eps);
  NmfModel& nmf = state.nmf;
  if (!config.fixed_basis()) nmf.w = weighted_update_w(nmf.w, state.s, nmf.x, config.eps);
  nmf.x = weighted_update_x(nmf.x, state.s, nmf.w, lambda, config.eps);

  if (config.pure_mode) return;
  state.rir.h.col(0) = state.rir.h.col(0).cwiseMax(config.eps);
  normalize_rir(state.rir, &state.s);
  if (!config.fixed_basis()) normalize_basis(nmf.w, &nmf.x);
  clamp_decay(state.rir);
  if (config.phi_x != 1.0) {
    nmf.x = nmf.x.array().pow(config.phi_x);
    state.s = state.s.array().pow(config.phi_x);
  }
}

WeightedState weighted_initialize(const Matrix& y, const EngineConfig& config,
                                  const std::optional<Matrix>& fixed_basis) {
  if (config.fixed_basis() != fixed_basis.has_value()) {
    throw Error(Errc::InvalidConfig, config.fixed_basis()
                                         ? "variant needs a pre-trained basis"
                                         : "a fixed basis was given for the online variant");
  }
  WeightedState state;
  state.rho = config.rho;
  state.s = y;
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

WeightedResult run_weighted(const Matrix& y, const EngineConfig& config,
                            const std::optional<Matrix>& fixed_basis) {
  config.validate_weighted();
  const double lambda = config.resolve_lambda(y);
  WeightedState state = weighted_initialize(y, config, fixed_basis);

  WeightedResult result;
  result.lambda = lambda;
  result.report.total_name = "L2";
  result.report.first_name = "P_term";
  result.report.second_name = "Q_term";
  result.report.cost_trace.push_back(weighted_cost(y, state, lambda));
  for (int it = 0; it < config.iterations; ++it) {
    weighted_sweep(state, y, config, lambda);
    result.report.cost_trace.push_back(weighted_cost(y, state, lambda));
  }
  result.report.iterations_run = config.iterations;
  result.report.final_kl = kl_divergence(y, rowwise_convolve(state.s, state.rir));
  result.gain = weighted_gain(state.s, state.rir, config.eps);
  result.state = std::move(state);
  return result;
}

}  // namespace nctf
