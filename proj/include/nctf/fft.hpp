#pragma once

#include <complex>
#include <cstddef>
#include <memory>
#include <span>

namespace nctf {

// Real-input DFT of a fixed length backed by FFTW (estimate-mode plans, so
// repeated runs take identical code paths). Instances are not shareable
// across threads; create one per worker.
class RealFft {
 public:
  explicit RealFft(std::size_t n);
  ~RealFft();
  RealFft(RealFft&&) noexcept;
  RealFft& operator=(RealFft&&) noexcept;
  RealFft(const RealFft&) = delete;
  RealFft& operator=(const RealFft&) = delete;

  std::size_t size() const noexcept { return n_; }
  std::size_t bins() const noexcept { return n_ / 2 + 1; }

  // in.size() == size(), out.size() == bins(). Unnormalized.
  void forward(std::span<const double> in, std::span<std::complex<double>> out);
  // in.size() == bins(), out.size() == size(). Scaled by 1/size().
  void inverse(std::span<const std::complex<double>> in, std::span<double> out);

 private:
  struct Plans;
  std::size_t n_ = 0;
  std::unique_ptr<Plans> plans_;
};

}  // namespace nctf
