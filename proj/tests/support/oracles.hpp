#pragma once

// Brute-force reference implementations written straight from the model
// definitions, plus random instance generators. Shared by the unit and
// acceptance suites.

#include <cmath>
#include <cstdint>
#include <random>

#include <Eigen/Dense>

namespace oracle {

using Matrix = Eigen::MatrixXd;

inline Matrix random_positive(Eigen::Index rows, Eigen::Index cols, std::mt19937_64& gen,
                              double lo = 0.1, double hi = 2.0) {
  std::uniform_real_distribution<double> dist(lo, hi);
  Matrix m(rows, cols);
  for (Eigen::Index j = 0; j < cols; ++j)
    for (Eigen::Index i = 0; i < rows; ++i) m(i, j) = dist(gen);
  return m;
}

// out(k, t) = sum_{tau <= t} h(k, tau) s(k, t - tau), accumulated in tau order.
inline Matrix convolve(const Matrix& s, const Matrix& h) {
  Matrix out(s.rows(), s.cols());
  for (Eigen::Index k = 0; k < s.rows(); ++k) {
    for (Eigen::Index t = 0; t < s.cols(); ++t) {
      double acc = 0.0;
      for (Eigen::Index tau = 0; tau < h.cols() && tau <= t; ++tau) acc += h(k, tau) * s(k, t - tau);
      out(k, t) = acc;
    }
  }
  return out;
}

inline double kl(const Matrix& y, const Matrix& y_hat) {
  double total = 0.0;
  for (Eigen::Index j = 0; j < y.cols(); ++j) {
    for (Eigen::Index i = 0; i < y.rows(); ++i) {
      const double a = y(i, j), b = y_hat(i, j);
      total += (a > 0.0 ? a * std::log(a / b) : 0.0) + b - a;
    }
  }
  return total;
}

// Multiplicative h step: h * sum_t ratio(t) s(t - tau) / sum_t s(t - tau),
// with t running over frames where the lagged s exists.
inline Matrix update_h(const Matrix& h, const Matrix& s, const Matrix& y, double eps) {
  const Matrix y_hat = convolve(s, h);
  Matrix out = h;
  for (Eigen::Index k = 0; k < h.rows(); ++k) {
    for (Eigen::Index tau = 0; tau < h.cols(); ++tau) {
      double num = 0.0, den = 0.0;
      for (Eigen::Index t = tau; t < s.cols(); ++t) {
        num += y(k, t) / (y_hat(k, t) + eps) * s(k, t - tau);
        den += s(k, t - tau);
      }
      out(k, tau) = h(k, tau) * num / (den + eps);
    }
  }
  return out;
}

// Multiplicative s step with taps limited to frames that exist after t.
inline Matrix update_s(const Matrix& s, const Matrix& h, const Matrix& y, double lambda,
                       double eps) {
  const Matrix y_hat = convolve(s, h);
  Matrix out = s;
  for (Eigen::Index k = 0; k < s.rows(); ++k) {
    for (Eigen::Index t = 0; t < s.cols(); ++t) {
      double num = 0.0, den = 0.0;
      for (Eigen::Index tau = 0; tau < h.cols() && t + tau < s.cols(); ++tau) {
        num += h(k, tau) * y(k, t + tau) / (y_hat(k, t + tau) + eps);
        den += h(k, tau);
      }
      out(k, t) = s(k, t) * num / (den + lambda + eps);
    }
  }
  return out;
}

// Column t holds base frames t .. t + t_st - 1, zero past the end.
inline Matrix stack(const Matrix& y, int t_st) {
  const Eigen::Index k = y.rows();
  Matrix out = Matrix::Zero(k * t_st, y.cols());
  for (Eigen::Index t = 0; t < y.cols(); ++t)
    for (int l = 0; l < t_st; ++l)
      for (Eigen::Index i = 0; i < k; ++i)
        if (t + l < y.cols()) out(l * k + i, t) = y(i, t + l);
  return out;
}

// sum over blocks l of m(k + K l, t), accumulated in l order.
inline Matrix block_sum(const Matrix& m, Eigen::Index k_base, int t_st) {
  Matrix out(k_base, m.cols());
  for (Eigen::Index t = 0; t < m.cols(); ++t) {
    for (Eigen::Index k = 0; k < k_base; ++k) {
      double acc = 0.0;
      for (int l = 0; l < t_st; ++l) acc += m(k + k_base * l, t);
      out(k, t) = acc;
    }
  }
  return out;
}

// Stacked gain from an already formed model product W_st X.
inline Matrix stacked_gain(const Matrix& h, const Matrix& s_model, int t_st, double eps) {
  const Matrix y_hat = convolve(s_model, h.replicate(t_st, 1));
  const Matrix num = block_sum(s_model, h.rows(), t_st);
  const Matrix den = block_sum(y_hat, h.rows(), t_st);
  return num.array() / (den.array() + eps);
}

inline double max_rel_diff(const Matrix& a, const Matrix& b) {
  double worst = 0.0;
  for (Eigen::Index j = 0; j < a.cols(); ++j)
    for (Eigen::Index i = 0; i < a.rows(); ++i) {
      const double scale = std::max({std::abs(a(i, j)), std::abs(b(i, j)), 1e-300});
      worst = std::max(worst, std::abs(a(i, j) - b(i, j)) / scale);
    }
  return worst;
}

// Newton on w e^w = z, independent of the library's Halley iteration.
inline double lambert_w0(double z) {
  double w = z < 1.0 ? z : std::log(z);
  for (int i = 0; i < 200; ++i) {
    const double f = w * std::exp(w) - z;
    const double step = f / (std::exp(w) * (w + 1.0));
    w -= step;
    if (std::abs(step) <= 1e-16 * std::max(1.0, std::abs(w))) break;
  }
  return w;
}

}  // namespace oracle
