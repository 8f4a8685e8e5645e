#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "nctf/types.hpp"

namespace nctf {

enum class BasisMode { online, fixed_lowrank, fixed_overcomplete };

std::string_view to_string(BasisMode mode) noexcept;
BasisMode parse_basis_mode(std::string_view name);

/// Tunables shared by the estimation engines.
struct EngineConfig {
  int rank = 100;
  int iterations = 20;
  int lh = 10;
  int power_p = 1;
  std::optional<double> lambda;  // empty: 0.1 / (K T) * sum(y)
  double phi_x = 1.02;
  double eps = kDefaultEps;
  std::uint64_t seed = 1;
  BasisMode basis_mode = BasisMode::online;
  int t_st = 1;
  double rho = 0.75;
  int nmf_init_iterations = 10;
  // Disables normalization, decay clamping and the phi_x power step.
  bool pure_mode = false;

  bool fixed_basis() const noexcept { return basis_mode != BasisMode::online; }
  double resolve_lambda(const Matrix& y) const;

  /// Throws InvalidConfig (or InvalidWeight for rho outside (0, 1)).
  void validate() const;
  void validate_weighted() const;
};

/// One row of a fit trace: the total cost and its two parts.
struct CostTerms {
  double total = 0.0;
  double first = 0.0;
  double second = 0.0;
};

struct FitReport {
  // Column names for total/first/second, e.g. {"L1_cost", "kl_term", "sparsity_term"}.
  std::string total_name = "cost";
  std::string first_name = "first";
  std::string second_name = "second";
  // Entry 0 is the cost at initialization, entry i the cost after sweep i.
  std::vector<CostTerms> cost_trace;
  double final_kl = 0.0;
  int iterations_run = 0;

  /// True if every step satisfies next <= prev + slack * |prev|.
  bool non_increasing(double relative_slack) const;
  void write_csv(std::ostream& os) const;
};

}  // namespace nctf
