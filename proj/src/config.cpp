#include "nctf/config.hpp"

#include <cmath>
#include <cstdio>
#include <ostream>

#include "nctf/error.hpp"
#include "nctf/nctf_core.hpp"

namespace nctf {

std::string_view to_string(BasisMode mode) noexcept {
  switch (mode) {
    case BasisMode::online: return "online";
    case BasisMode::fixed_lowrank: return "lowrank";
    case BasisMode::fixed_overcomplete: return "overcomplete";
  }
  return "online";
}

BasisMode parse_basis_mode(std::string_view name) {
  if (name == "online") return BasisMode::online;
  if (name == "lowrank") return BasisMode::fixed_lowrank;
  if (name == "overcomplete") return BasisMode::fixed_overcomplete;
  throw Error(Errc::InvalidConfig, "unknown variant '" + std::string(name) + "'");
}

double EngineConfig::resolve_lambda(const Matrix& y) const {
  SparsityConfig sparsity;
  sparsity.auto_scale = !lambda.has_value();
  sparsity.lambda = lambda.value_or(0.0);
  return sparsity.resolve(y);
}

void EngineConfig::validate() const {
  auto fail = [](const std::string& what) { throw Error(Errc::InvalidConfig, what); };
  if (rank < 1) fail("rank must be >= 1");
  if (iterations < 1) fail("iterations must be >= 1");
  if (lh < 1) fail("lh must be >= 1");
  if (t_st < 1) fail("t_st must be >= 1");
  if (power_p != 1 && power_p != 2) fail("power must be 1 or 2");
  if (lambda && !(*lambda >= 0.0)) fail("lambda must be >= 0");
  if (!(phi_x >= 1.0) || !std::isfinite(phi_x)) fail("phi_x must be >= 1");
  if (!(eps > 0.0)) fail("eps must be > 0");
  if (nmf_init_iterations < 0) fail("nmf_init_iterations must be >= 0");
}

void EngineConfig::validate_weighted() const {
  validate();
  if (!(rho > 0.0 && rho < 1.0)) {
    throw Error(Errc::InvalidWeight, "rho must lie in (0, 1), got " + std::to_string(rho));
  }
}

bool FitReport::non_increasing(double relative_slack) const {
  for (std::size_t i = 1; i < cost_trace.size(); ++i) {
    const double prev = cost_trace[i - 1].total;
    const double next = cost_trace[i].total;
    if (next > prev + relative_slack * std::abs(prev)) return false;
  }
  return true;
}

void FitReport::write_csv(std::ostream& os) const {
  os << "iteration," << total_name << ',' << first_name << ',' << second_name << '\n';
  char buf[128];
  for (std::size_t i = 0; i < cost_trace.size(); ++i) {
    const CostTerms& c = cost_trace[i];
    std::snprintf(buf, sizeof buf, "%zu,%.17g,%.17g,%.17g\n", i, c.total, c.first, c.second);
    os << buf;
  }
}

}  // namespace nctf
