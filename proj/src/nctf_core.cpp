#include "nctf/nctf_core.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "nctf/error.hpp"

namespace nctf {

namespace {

std::string dims(const Matrix& m) {
  return std::to_string(m.rows()) + "x" + std::to_string(m.cols());
}

void require_same_shape(const Matrix& a, const Matrix& b, const char* what) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw Error(Errc::DimensionMismatch, std::string(what) + ": " + dims(a) + " vs " + dims(b));
  }
}

void require_rows(const Matrix& m, Eigen::Index rows, const char* what) {
  if (m.rows() != rows) {
    throw Error(Errc::DimensionMismatch,
                std::string(what) + ": expected " + std::to_string(rows) + " rows, got " + dims(m));
  }
}

}  // namespace

double SparsityConfig::resolve(const Matrix& y) const {
  if (!auto_scale) return lambda;
  if (y.size() == 0) return 0.0;
  return 0.1 / static_cast<double>(y.size()) * y.sum();
}

Matrix rowwise_convolve(const Matrix& s, const RirModel& h) {
  require_rows(h.h, s.rows(), "rowwise_convolve");
  if (h.taps() < 1) throw Error(Errc::DimensionMismatch, "rowwise_convolve: empty RIR");
  const Eigen::Index frames = s.cols();
  Matrix out = Matrix::Zero(s.rows(), frames);
  for (Eigen::Index tau = 0; tau < h.taps() && tau < frames; ++tau) {
    out.rightCols(frames - tau).noalias() += h.h.col(tau).asDiagonal() * s.leftCols(frames - tau);
  }
  return out;
}

Matrix rowwise_correlate(const Matrix& z, const RirModel& h) {
  require_rows(h.h, z.rows(), "rowwise_correlate");
  const Eigen::Index frames = z.cols();
  Matrix out = Matrix::Zero(z.rows(), frames);
  for (Eigen::Index tau = 0; tau < h.taps() && tau < frames; ++tau) {
    out.leftCols(frames - tau).noalias() += h.h.col(tau).asDiagonal() * z.rightCols(frames - tau);
  }
  return out;
}

Matrix lagged_products(const Matrix& z, const Matrix& s, Eigen::Index taps) {
  require_same_shape(z, s, "lagged_products");
  const Eigen::Index frames = s.cols();
  Matrix out = Matrix::Zero(s.rows(), taps);
  for (Eigen::Index tau = 0; tau < taps && tau < frames; ++tau) {
    out.col(tau) =
        z.rightCols(frames - tau).cwiseProduct(s.leftCols(frames - tau)).rowwise().sum();
  }
  return out;
}

Matrix shifted_row_sums(const Matrix& s, Eigen::Index taps) {
  const Eigen::Index frames = s.cols();
  Matrix out = Matrix::Zero(s.rows(), taps);
  for (Eigen::Index tau = 0; tau < taps && tau < frames; ++tau) {
    out.col(tau) = s.leftCols(frames - tau).rowwise().sum();
  }
  return out;
}

Matrix truncated_tap_sums(const RirModel& h, Eigen::Index frames) {
  const Eigen::Index taps = h.taps();
  Matrix cumulative = Matrix::Zero(h.bins(), taps + 1);
  for (Eigen::Index tau = 0; tau < taps; ++tau) {
    cumulative.col(tau + 1) = cumulative.col(tau) + h.h.col(tau);
  }
  Matrix out(h.bins(), frames);
  for (Eigen::Index t = 0; t < frames; ++t) {
    out.col(t) = cumulative.col(std::min(taps, frames - t));
  }
  return out;
}

double kl_divergence(const Matrix& y, const Matrix& y_hat) {
  require_same_shape(y, y_hat, "kl_divergence");
  double total = 0.0;
  const double* yp = y.data();
  const double* mp = y_hat.data();
  for (Eigen::Index i = 0; i < y.size(); ++i) {
    const double a = yp[i];
    const double b = mp[i];
    if (a == 0.0) {
      total += b;
    } else if (b == 0.0) {
      return std::numeric_limits<double>::infinity();
    } else {
      total += a * std::log(a / b) + b - a;
    }
  }
  return total;
}

RirModel baseline_update_h(const RirModel& h, const Matrix& s, const Matrix& y, double eps) {
  require_same_shape(s, y, "baseline_update_h");
  const Matrix y_hat = rowwise_convolve(s, h);
  const Matrix ratio = y.array() / (y_hat.array() + eps);
  const Matrix num = lagged_products(ratio, s, h.taps());
  const Matrix den = shifted_row_sums(s, h.taps());
  return RirModel{h.h.array() * num.array() / (den.array() + eps)};
}

Matrix baseline_update_s(const Matrix& s, const RirModel& h, const Matrix& y, double lambda,
                         double eps) {
  require_same_shape(s, y, "baseline_update_s");
  const Matrix y_hat = rowwise_convolve(s, h);
  const Matrix ratio = y.array() / (y_hat.array() + eps);
  const Matrix num = rowwise_correlate(ratio, h);
  const Matrix den = truncated_tap_sums(h, s.cols());
  return s.array() * num.array() / (den.array() + lambda + eps);
}

double baseline_cost(const Matrix& y, const Matrix& s, const RirModel& h, double lambda) {
  return kl_divergence(y, rowwise_convolve(s, h)) + lambda * s.sum();
}

void normalize_rir(RirModel& h, Matrix* row_scale_into) {
  const Eigen::Index bins = h.bins();
  if (row_scale_into != nullptr && (bins == 0 || row_scale_into->rows() % bins != 0)) {
    throw Error(Errc::DimensionMismatch, "normalize_rir: " + dims(*row_scale_into) +
                                             " is not a row multiple of " + dims(h.h));
  }
  for (Eigen::Index k = 0; k < bins; ++k) {
    const double first = h.h(k, 0);
    if (!(first > 0.0) || !std::isfinite(first)) {
      throw Error(Errc::DegenerateFirstColumn, "row " + std::to_string(k));
    }
    h.h.row(k) /= first;
    if (row_scale_into != nullptr) {
      for (Eigen::Index r = k; r < row_scale_into->rows(); r += bins) {
        row_scale_into->row(r) *= first;
      }
    }
  }
}

void normalize_basis(Matrix& w, Matrix* col_scale_into) {
  if (col_scale_into != nullptr && col_scale_into->rows() != w.cols()) {
    throw Error(Errc::DimensionMismatch,
                "normalize_basis: activations " + dims(*col_scale_into) + " vs basis " + dims(w));
  }
  for (Eigen::Index r = 0; r < w.cols(); ++r) {
    const double total = w.col(r).sum();
    if (!(total > 0.0)) continue;
    w.col(r) /= total;
    if (col_scale_into != nullptr) col_scale_into->row(r) *= total;
  }
}

void normalize_scale(RirModel& h, Matrix* w, Matrix* x_scale_into) {
  normalize_rir(h, w);
  if (w != nullptr) normalize_basis(*w, x_scale_into);
}

void clamp_decay(RirModel& h) {
  for (Eigen::Index tau = 1; tau < h.taps(); ++tau) {
    h.h.col(tau) = h.h.col(tau).cwiseMin(h.h.col(tau - 1));
  }
}

RirModel init_rir(Eigen::Index bins, Eigen::Index taps) {
  if (bins < 1 || taps < 1) throw Error(Errc::InvalidConfig, "init_rir needs K, L_h >= 1");
  RirModel h{Matrix(bins, taps)};
  for (Eigen::Index tau = 0; tau < taps; ++tau) {
    h.h.col(tau).setConstant(static_cast<double>(taps - tau) / static_cast<double>(taps));
  }
  return h;
}

}  // namespace nctf
