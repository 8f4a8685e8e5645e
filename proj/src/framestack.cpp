#include "nctf/framestack.hpp"

#include <string>

#include "engine_detail.hpp"
#include "nctf/error.hpp"

namespace nctf {

namespace {

Matrix sum_blocks(const Matrix& stacked, Eigen::Index base_rows, int t_st) {
  Matrix out = stacked.topRows(base_rows);
  for (int l = 1; l < t_st; ++l) out += stacked.middleRows(l * base_rows, base_rows);
  return out;
}

void check_stacked(const RirModel& h, const Matrix& w_st, const Matrix& x, int t_st) {
  if (t_st < 1) throw Error(Errc::InvalidWindow, "t_st must be >= 1");
  if (w_st.rows() != h.bins() * t_st || w_st.cols() != x.rows()) {
    throw Error(Errc::DimensionMismatch,
                "stacked basis has " + std::to_string(w_st.rows()) + " rows, expected " +
                    std::to_string(h.bins() * t_st));
  }
}

}  // namespace

StackedSpectrogram stack(const Matrix& spec, int t_st) {
  if (t_st < 1) throw Error(Errc::InvalidWindow, "t_st must be >= 1, got " + std::to_string(t_st));
  const Eigen::Index k = spec.rows();
  const Eigen::Index frames = spec.cols();
  StackedSpectrogram out;
  out.t_st = t_st;
  out.base_k = k;
  out.values = Matrix::Zero(k * t_st, frames);
  for (int l = 0; l < t_st && l < frames; ++l) {
    out.values.block(l * k, 0, k, frames - l) = spec.rightCols(frames - l);
  }
  return out;
}

RirModel replicate_rir(const RirModel& h, int t_st) {
  if (t_st < 1) throw Error(Errc::InvalidWindow, "t_st must be >= 1");
  return RirModel{h.h.replicate(t_st, 1)};
}

RirModel stacked_update_h(const RirModel& h, const Matrix& w_st, const Matrix& x,
                          const Matrix& y_st, int t_st, double eps) {
  check_stacked(h, w_st, x, t_st);
  if (y_st.rows() != w_st.rows() || y_st.cols() != x.cols()) {
    throw Error(Errc::DimensionMismatch, "stacked_update_h: y_st does not match the model");
  }
  const Matrix s_model = w_st * x;
  const Matrix y_hat = rowwise_convolve(s_model, replicate_rir(h, t_st));
  const Matrix ratio = y_st.array() / (y_hat.array() + eps);
  const Matrix num = sum_blocks(lagged_products(ratio, s_model, h.taps()), h.bins(), t_st);
  const Matrix den = sum_blocks(shifted_row_sums(s_model, h.taps()), h.bins(), t_st);
  return RirModel{h.h.array() * num.array() / (den.array() + eps)};
}

Matrix stacked_gain(const RirModel& h, const Matrix& w_st, const Matrix& x, int t_st,
                    double eps) {
  check_stacked(h, w_st, x, t_st);
  const Matrix s_model = w_st * x;
  const Matrix y_hat = rowwise_convolve(s_model, replicate_rir(h, t_st));
  const Matrix num = sum_blocks(s_model, h.bins(), t_st);
  const Matrix den = sum_blocks(y_hat, h.bins(), t_st);
  return num.array() / (den.array() + eps);
}

CostTerms stacked_cost(const Matrix& y_st, const RirModel& h, const Matrix& w_st,
                       const Matrix& x, int t_st, double lambda) {
  check_stacked(h, w_st, x, t_st);
  const double kl = kl_divergence(y_st, rowwise_convolve(w_st * x, replicate_rir(h, t_st)));
  const double sparsity = lambda * x.sum();
  return {kl + sparsity, kl, sparsity};
}

void stacked_sweep(IntegratedState& state, const Matrix& y_st, int t_st,
                   const EngineConfig& config, double lambda) {
  NmfModel& nmf = state.nmf;
  state.rir = stacked_update_h(state.rir, nmf.w, nmf.x, y_st, t_st, config.eps);
  const RirModel h_st = replicate_rir(state.rir, t_st);
  if (!config.fixed_basis()) nmf.w = integrated_update_w(nmf.w, h_st, nmf.x, y_st, config.eps);
  nmf.x = integrated_update_x(nmf.x, h_st, nmf.w, y_st, lambda, config.eps);
  detail::integrated_post_steps(state, config);
}

IntegratedResult run_stacked(const Matrix& y, const EngineConfig& config,
                             const std::optional<Matrix>& fixed_basis) {
  config.validate();
  const int t_st = config.t_st;
  const double lambda = config.resolve_lambda(y);
  const Matrix y_st = stack(y, t_st).values;

  IntegratedState state = integrated_initialize(y_st, config, fixed_basis);
  state.rir = init_rir(y.rows(), config.lh);

  IntegratedResult result;
  result.lambda = lambda;
  result.report.total_name = "L1_st_cost";
  result.report.first_name = "kl_term";
  result.report.second_name = "sparsity_term";
  auto cost = [&] { return stacked_cost(y_st, state.rir, state.nmf.w, state.nmf.x, t_st, lambda); };
  result.report.cost_trace.push_back(cost());
  for (int it = 0; it < config.iterations; ++it) {
    stacked_sweep(state, y_st, t_st, config, lambda);
    result.report.cost_trace.push_back(cost());
  }
  result.report.iterations_run = config.iterations;
  result.report.final_kl = result.report.cost_trace.back().first;
  result.gain = stacked_gain(state.rir, state.nmf.w, state.nmf.x, t_st, config.eps);
  result.model = std::move(state.nmf);
  result.rir = std::move(state.rir);
  return result;
}

}  // namespace nctf
