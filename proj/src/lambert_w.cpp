#include "nctf/lambert_w.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "nctf/error.hpp"

namespace nctf {

namespace {
constexpr int kMaxIterations = 50;
constexpr double kTolerance = 1e-15;
}  // namespace

double lambert_w0(double z) {
  if (!(z >= 0.0)) throw Error(Errc::NegativeArgument, "lambert_w0(" + std::to_string(z) + ")");
  if (z == 0.0) return 0.0;
  if (std::isinf(z)) return z;

  double w = std::log1p(z);
  for (int i = 0; i < kMaxIterations; ++i) {
    const double ew = std::exp(w);
    const double f = w * ew - z;
    const double wp1 = w + 1.0;
    const double step = f / (ew * wp1 - (w + 2.0) * f / (2.0 * wp1));
    w -= step;
    if (std::abs(step) <= kTolerance * (1.0 + std::abs(w))) break;
  }
  return w;
}

double lambert_w0_exp(double a) {
  if (std::isnan(a)) throw Error(Errc::NegativeArgument, "lambert_w0_exp(NaN)");
  if (a <= 700.0) return lambert_w0(std::exp(a));
  if (std::isinf(a)) return a;

  // Newton on w + log(w) - a; w > 600 here, so log(w) is a small correction.
  double w = a - std::log(a);
  for (int i = 0; i < kMaxIterations; ++i) {
    const double f = w + std::log(w) - a;
    const double step = f / (1.0 + 1.0 / w);
    w -= step;
    if (std::abs(step) <= kTolerance * w) break;
  }
  return w;
}

}  // namespace nctf
