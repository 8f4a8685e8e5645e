#include <doctest.h>

#include <random>

#include "../support/oracles.hpp"
#include "nctf/error.hpp"
#include "nctf/framestack.hpp"
#include "nctf/integrated.hpp"
#include "nctf/nctf_core.hpp"

using namespace nctf;

TEST_SUITE("framestack") {
  TEST_CASE("stacking examples") {
    Matrix y(2, 3);
    y << 1, 2, 3, 4, 5, 6;
    CHECK(stack(y, 1).values == y);
    Matrix expected(4, 3);
    expected << 1, 2, 3, 4, 5, 6, 2, 3, 0, 5, 6, 0;
    CHECK(stack(y, 2).values == expected);
    CHECK(stack(Matrix::Zero(3, 4), 3).values.maxCoeff() == 0.0);
    try {
      stack(y, 0);
      FAIL("expected InvalidWindow");
    } catch (const Error& e) {
      CHECK(e.code() == Errc::InvalidWindow);
    }
  }

  TEST_CASE("block probes match the base spectrogram") {
    std::mt19937_64 gen(1);
    const Matrix y = oracle::random_positive(5, 9, gen);
    const auto st = stack(y, 4);
    CHECK(st.values == oracle::stack(y, 4));
    std::uniform_int_distribution<int> pick_l(0, 3), pick_t(0, 8), pick_k(0, 4);
    for (int probe = 0; probe < 200; ++probe) {
      const int l = pick_l(gen), t = pick_t(gen), k = pick_k(gen);
      CHECK(st.block(l)(k, t) == (t + l < 9 ? y(k, t + l) : 0.0));
    }
  }

  TEST_CASE("one-frame stacking reduces exactly") {
    std::mt19937_64 gen(2);
    const RirModel h{oracle::random_positive(4, 3, gen)};
    const Matrix w = oracle::random_positive(4, 2, gen);
    const Matrix x = oracle::random_positive(2, 10, gen);
    const Matrix y = oracle::random_positive(4, 10, gen);
    CHECK(stacked_update_h(h, w, x, y, 1).h == integrated_update_h(h, w, x, y).h);
    CHECK(stacked_gain(h, w, x, 1) == integrated_gain(h, w, x));
  }

  TEST_CASE("h update sums every block through one RIR") {
    std::mt19937_64 gen(3);
    const int t_st = 3;
    const RirModel h{oracle::random_positive(2, 3, gen)};
    const Matrix w = oracle::random_positive(2 * t_st, 2, gen);
    const Matrix x = oracle::random_positive(2, 7, gen);
    const Matrix y = oracle::random_positive(2 * t_st, 7, gen);
    const Matrix s = w * x;
    const Matrix h_st = h.h.replicate(t_st, 1);
    const Matrix y_hat = oracle::convolve(s, h_st);
    Matrix ref = h.h;
    for (Eigen::Index k = 0; k < 2; ++k)
      for (Eigen::Index tau = 0; tau < 3; ++tau) {
        double num = 0.0, den = 0.0;
        for (int l = 0; l < t_st; ++l)
          for (Eigen::Index t = tau; t < 7; ++t) {
            const Eigen::Index f = k + 2 * l;
            num += y(f, t) / (y_hat(f, t) + kDefaultEps) * s(f, t - tau);
            den += s(f, t - tau);
          }
        ref(k, tau) *= num / (den + kDefaultEps);
      }
    CHECK(oracle::max_rel_diff(stacked_update_h(h, w, x, y, t_st).h, ref) < 1e-12);
    const Matrix exact = oracle::convolve(s, h_st);
    CHECK(oracle::max_rel_diff(stacked_update_h(h, w, x, exact, t_st).h, h.h) < 1e-10);
  }

  TEST_CASE("gain matches the block oracle") {
    std::mt19937_64 gen(4);
    for (int t_st : {1, 2, 3}) {
      const RirModel h{oracle::random_positive(3, 2, gen)};
      const Matrix w = oracle::random_positive(3 * t_st, 2, gen);
      const Matrix x = oracle::random_positive(2, 6, gen);
      CHECK(stacked_gain(h, w, x, t_st) == oracle::stacked_gain(h.h, w * x, t_st, kDefaultEps));
    }
    const Matrix g = stacked_gain(RirModel{Matrix::Ones(2, 1)}, Matrix::Ones(4, 1), Matrix::Ones(1, 5), 2);
    CHECK((g.array() - 1.0).abs().maxCoeff() < 1e-12);
    CHECK_THROWS_AS(stacked_gain(RirModel{Matrix::Ones(2, 1)}, Matrix::Ones(3, 1), Matrix::Ones(1, 5), 2), Error);
  }

  TEST_CASE("pure stacked runs descend") {
    std::mt19937_64 gen(5);
    for (int trial = 0; trial < 5; ++trial) {
      const Matrix y = oracle::random_positive(16, 32, gen);
      EngineConfig cfg;
      cfg.rank = 4;
      cfg.lh = 3;
      cfg.t_st = 3;
      cfg.iterations = 20;
      cfg.pure_mode = true;
      const auto r = run_stacked(y, cfg);
      CHECK(r.report.non_increasing(1e-9));
      CHECK(r.gain.rows() == 16);
      CHECK(r.gain.cols() == 32);
    }
  }
}
