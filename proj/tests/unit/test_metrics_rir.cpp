#include <doctest.h>

#include <cmath>
#include <random>

#include "../support/oracles.hpp"
#include "nctf/error.hpp"
#include "nctf/metrics.hpp"
#include "nctf/rir.hpp"
#include "nctf/scene.hpp"

using namespace nctf;

TEST_SUITE("metrics_rir") {
  TEST_CASE("RIR envelope, DRR and determinism") {
    for (double t60 : {0.3, 0.68}) {
      for (double drr : {-5.0, 0.0, 12.0}) {
        RirSpec spec;
        spec.t60 = t60;
        spec.drr_db = drr;
        spec.seed = 4;
        const Signal h = synthesize_rir(spec);
        CHECK(h.samples[0] == 1.0);
        CHECK(std::abs(measure_drr_db(h.samples) - drr) <= 0.1);
        const double slope = fitted_decay_slope_db_per_s(h.samples, 16000, 0.5 * t60);
        CHECK(std::abs(slope - (-60.0 / t60)) <= 0.05 * 60.0 / t60);
        CHECK(synthesize_rir(spec).samples == h.samples);
      }
    }
    // The envelope itself is 60 dB down after t60 seconds.
    const double decay = 3.0 * std::log(10.0) / (16000 * 0.68);
    CHECK(20.0 * std::log10(std::exp(-decay * 16000 * 0.68)) == doctest::Approx(-60.0));
  }

  TEST_CASE("RIR spec validation") {
    RirSpec bad;
    bad.t60 = 0.0;
    CHECK_THROWS_AS(synthesize_rir(bad), Error);
    RirSpec short_spec;
    short_spec.length = 1;
    CHECK_THROWS_AS(synthesize_rir(short_spec), Error);
  }

  TEST_CASE("log-spectral distance") {
    std::mt19937_64 gen(1);
    const Matrix a = oracle::random_positive(8, 10, gen);
    CHECK(log_spectral_distance(a, a) == 0.0);
    CHECK(log_spectral_distance(2.0 * a, a, -300.0) == doctest::Approx(20.0 * std::log10(2.0)).epsilon(1e-12));
    Matrix z = a;
    z.col(3).setZero();
    CHECK(std::isfinite(log_spectral_distance(a, z)));
    CHECK(log_spectral_distance(a, z) > 0.0);
    CHECK_THROWS_AS(log_spectral_distance(a, Matrix::Ones(3, 3)), Error);
  }

  TEST_CASE("KL fit") {
    std::mt19937_64 gen(2);
    const Matrix y = oracle::random_positive(6, 6, gen);
    CHECK(kl_fit(y, y) == 0.0);
    CHECK(kl_fit(y, 2.0 * y) == doctest::Approx(2.0 - 1.0 - std::log(2.0)).epsilon(1e-12));
    for (int trial = 0; trial < 20; ++trial) {
      const Matrix noise = oracle::random_positive(6, 6, gen, -0.5, 0.5);
      const Matrix small = (y.array() * (1.0 + 0.5 * noise.array())).matrix();
      const Matrix large = (y.array() * (1.0 + noise.array())).matrix();
      CHECK(kl_fit(y, large) >= kl_fit(y, small));
    }
  }

  TEST_CASE("cepstral distance") {
    const Signal ref = synthesize_speech_like(1.5, 3);
    CHECK(cepstral_distance(ref, ref) == 0.0);
    Signal half = ref;
    for (double& v : half.samples) v *= 0.5;
    CHECK(cepstral_distance(ref, half) < 1e-9);

    Signal other = synthesize_speech_like(1.5, 4);
    other.samples.resize(ref.size());
    const double d = cepstral_distance(ref, other);
    CHECK(d > 0.0);

    // Swapping the inputs only changes which frames are active; with
    // selection disabled the distance is symmetric.
    CepstralConfig all_frames;
    all_frames.active_range_db = 400.0;
    CHECK(cepstral_distance(ref, other, all_frames) ==
          doctest::Approx(cepstral_distance(other, ref, all_frames)).epsilon(1e-12));

    Signal shorter = ref;
    shorter.samples.pop_back();
    try {
      cepstral_distance(ref, shorter);
      FAIL("expected LengthMismatch");
    } catch (const Error& e) {
      CHECK(e.code() == Errc::LengthMismatch);
    }
  }

  TEST_CASE("scene helpers") {
    const Signal clean = synthesize_speech_like(2.0, 1);
    double peak = 0.0;
    for (double v : clean.samples) peak = std::max(peak, std::abs(v));
    CHECK(peak == doctest::Approx(0.5));
    CHECK(synthesize_speech_like(2.0, 1).samples == clean.samples);

    const auto noise = speech_shaped_noise(clean, clean.size(), 7);
    REQUIRE(noise.size() == clean.size());
    for (double snr : {10.0, 20.0}) {
      const auto scaled = scale_to_snr(clean.samples, noise, snr);
      const double measured = 10.0 * std::log10(energy(clean.samples) / energy(scaled));
      CHECK(std::abs(measured - snr) <= 0.1);
    }
  }
}
