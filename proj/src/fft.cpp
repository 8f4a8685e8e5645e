#include "nctf/fft.hpp"

#include <algorithm>
#include <cassert>
#include <mutex>

#include <fftw3.h>

namespace nctf {

namespace {
// The FFTW planner is not thread-safe; execution is.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}
}  // namespace

struct RealFft::Plans {
  double* real = nullptr;
  fftw_complex* spec = nullptr;
  fftw_plan fwd = nullptr;
  fftw_plan inv = nullptr;

  explicit Plans(std::size_t n) {
    const int len = static_cast<int>(n);
    real = fftw_alloc_real(n);
    spec = fftw_alloc_complex(n / 2 + 1);
    std::lock_guard lock(planner_mutex());
    fwd = fftw_plan_dft_r2c_1d(len, real, spec, FFTW_ESTIMATE);
    inv = fftw_plan_dft_c2r_1d(len, spec, real, FFTW_ESTIMATE);
  }

  ~Plans() {
    std::lock_guard lock(planner_mutex());
    fftw_destroy_plan(fwd);
    fftw_destroy_plan(inv);
    fftw_free(real);
    fftw_free(spec);
  }
};

RealFft::RealFft(std::size_t n) : n_(n), plans_(std::make_unique<Plans>(n)) {}
RealFft::~RealFft() = default;
RealFft::RealFft(RealFft&&) noexcept = default;
RealFft& RealFft::operator=(RealFft&&) noexcept = default;

void RealFft::forward(std::span<const double> in, std::span<std::complex<double>> out) {
  assert(in.size() == n_ && out.size() == bins());
  std::copy(in.begin(), in.end(), plans_->real);
  fftw_execute(plans_->fwd);
  for (std::size_t k = 0; k < bins(); ++k) {
    out[k] = {plans_->spec[k][0], plans_->spec[k][1]};
  }
}

void RealFft::inverse(std::span<const std::complex<double>> in, std::span<double> out) {
  assert(in.size() == bins() && out.size() == n_);
  for (std::size_t k = 0; k < bins(); ++k) {
    plans_->spec[k][0] = in[k].real();
    plans_->spec[k][1] = in[k].imag();
  }
  // c2r destroys its input; the copy above makes that harmless.
  fftw_execute(plans_->inv);
  const double scale = 1.0 / static_cast<double>(n_);
  for (std::size_t i = 0; i < n_; ++i) out[i] = plans_->real[i] * scale;
}

}  // namespace nctf
