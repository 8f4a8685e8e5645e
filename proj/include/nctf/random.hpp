#pragma once

#include <cstdint>
#include <random>

namespace nctf {

// Seeded generator whose output sequence does not depend on the standard
// library's distribution implementations (std::mt19937_64 itself is fully
// specified).
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  // Uniform in [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  // Uniform integer in [0, n), n > 0.
  std::uint64_t below(std::uint64_t n);

  // Standard normal draw (Box-Muller, one value per call).
  double normal();

 private:
  std::mt19937_64 engine_;
};

}  // namespace nctf
