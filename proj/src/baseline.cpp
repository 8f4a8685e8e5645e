#include "nctf/baseline.hpp"

namespace nctf {

BaselineResult run_baseline(const Matrix& y, const EngineConfig& config) {
  config.validate();
  BaselineResult result;
  result.lambda = config.resolve_lambda(y);
  result.s = y;
  result.rir = init_rir(y.rows(), config.lh);
  result.report.total_name = "Q_cost";
  result.report.first_name = "kl_term";
  result.report.second_name = "sparsity_term";

  auto record = [&] {
    const double kl = kl_divergence(y, rowwise_convolve(result.s, result.rir));
    const double sparsity = result.lambda * result.s.sum();
    result.report.cost_trace.push_back({kl + sparsity, kl, sparsity});
  };

  record();
  for (int it = 0; it < config.iterations; ++it) {
    result.rir = baseline_update_h(result.rir, result.s, y, config.eps);
    result.s = baseline_update_s(result.s, result.rir, y, result.lambda, config.eps);
    if (!config.pure_mode) {
      result.rir.h.col(0) = result.rir.h.col(0).cwiseMax(config.eps);
      normalize_rir(result.rir, &result.s);
      clamp_decay(result.rir);
    }
    record();
  }
  result.report.iterations_run = config.iterations;
  result.report.final_kl = result.report.cost_trace.back().first;
  result.gain = result.s.array() / (y.array() + config.eps);
  return result;
}

}  // namespace nctf
