#include <doctest.h>

#include <cmath>
#include <cstdint>
#include <fstream>
#include <random>
#include <vector>

#include "nctf/error.hpp"
#include "nctf/signal_io.hpp"
#include "temp_dir.hpp"

using namespace nctf;

namespace {

void put_u32(std::ofstream& os, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) os.put(static_cast<char>((v >> (8 * i)) & 0xff));
}
void put_u16(std::ofstream& os, std::uint16_t v) {
  os.put(static_cast<char>(v & 0xff));
  os.put(static_cast<char>(v >> 8));
}

// Minimal PCM16 writer for handcrafted fixtures.
void write_pcm16(const std::filesystem::path& path, int channels, int rate,
                 const std::vector<std::int16_t>& codes) {
  std::ofstream os(path, std::ios::binary);
  const auto data_bytes = static_cast<std::uint32_t>(codes.size() * 2);
  os.write("RIFF", 4);
  put_u32(os, 36 + data_bytes);
  os.write("WAVEfmt ", 8);
  put_u32(os, 16);
  put_u16(os, 1);
  put_u16(os, static_cast<std::uint16_t>(channels));
  put_u32(os, static_cast<std::uint32_t>(rate));
  put_u32(os, static_cast<std::uint32_t>(rate * channels * 2));
  put_u16(os, static_cast<std::uint16_t>(channels * 2));
  put_u16(os, 16);
  os.write("data", 4);
  put_u32(os, data_bytes);
  for (auto c : codes) put_u16(os, static_cast<std::uint16_t>(c));
}

Errc code_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an Error");
  return Errc::IoFailure;
}

}  // namespace

TEST_SUITE("signal_io") {
  TEST_CASE("one second of zeros reads back at 16 kHz") {
    TempDir dir;
    write_pcm16(dir / "z.wav", 1, 16000, std::vector<std::int16_t>(16000, 0));
    const Signal s = read_wav(dir / "z.wav");
    CHECK(s.sample_rate_hz == 16000);
    REQUIRE(s.size() == 16000);
    for (double v : s.samples) CHECK(v == 0.0);
  }

  TEST_CASE("max code scales by 1/32768") {
    TempDir dir;
    write_pcm16(dir / "one.wav", 1, 16000, {32767});
    const Signal s = read_wav(dir / "one.wav");
    REQUIRE(s.size() == 1);
    CHECK(s.samples[0] == doctest::Approx(32767.0 / 32768.0).epsilon(1e-15));
  }

  TEST_CASE("stereo is rejected") {
    TempDir dir;
    write_pcm16(dir / "st.wav", 2, 16000, {1, 2, 3, 4});
    CHECK(code_of([&] { read_wav(dir / "st.wav"); }) == Errc::UnsupportedFormat);
  }

  TEST_CASE("garbage header and missing file") {
    TempDir dir;
    {
      std::ofstream os(dir / "bad.wav", std::ios::binary);
      os << "RIFX0000WAVE";
    }
    CHECK(code_of([&] { read_wav(dir / "bad.wav"); }) == Errc::CorruptHeader);
    CHECK(code_of([&] { read_wav(dir / "missing.wav"); }) == Errc::IoFailure);
  }

  TEST_CASE("write clamps and round trips within one quantization step") {
    TempDir dir;
    Signal s;
    s.samples = {0.0, 1.5, -1.5, 0.25};
    write_wav(s, dir / "c.wav");
    const Signal r = read_wav(dir / "c.wav");
    CHECK(r.samples[0] == 0.0);
    CHECK(r.samples[1] == doctest::Approx(32767.0 / 32768.0));
    CHECK(r.samples[2] == -1.0);
    CHECK(r.samples[3] == 0.25);

    std::mt19937_64 gen(7);
    std::uniform_real_distribution<double> dist(-1.0, 32767.0 / 32768.0);
    Signal rnd;
    for (int i = 0; i < 5000; ++i) rnd.samples.push_back(dist(gen));
    write_wav(rnd, dir / "r.wav");
    const Signal back = read_wav(dir / "r.wav");
    REQUIRE(back.size() == rnd.size());
    double worst = 0.0;
    for (std::size_t i = 0; i < rnd.size(); ++i)
      worst = std::max(worst, std::abs(back.samples[i] - rnd.samples[i]));
    CHECK(worst <= 1.0 / 32768.0);
  }

  TEST_CASE("non-finite samples are refused") {
    TempDir dir;
    Signal s;
    s.samples = {0.0, std::nan("")};
    CHECK(code_of([&] { write_wav(s, dir / "n.wav"); }) == Errc::NonFiniteSample);
  }

  TEST_CASE("sample-rate check") {
    Signal s;
    s.sample_rate_hz = 8000;
    CHECK(code_of([&] { require_sample_rate(s, 16000); }) == Errc::SampleRateMismatch);
    s.sample_rate_hz = 16000;
    CHECK_NOTHROW(require_sample_rate(s, 16000));
  }

  TEST_CASE("convolution examples") {
    CHECK(convolve(std::vector<double>{1, 0, 0}, std::vector<double>{1}) ==
          std::vector<double>{1, 0, 0});
    CHECK(convolve(std::vector<double>{1, 2}, std::vector<double>{1, 1}) ==
          std::vector<double>{1, 3, 2});
    for (double v : convolve(std::vector<double>(50, 0.0), std::vector<double>{0.3, 2.0, -1.0}))
      CHECK(v == 0.0);
  }

  TEST_CASE("FFT path matches the direct sum and is linear") {
    std::mt19937_64 gen(3);
    std::normal_distribution<double> nd;
    std::vector<double> a(700), b(300);
    for (auto& v : a) v = nd(gen);
    for (auto& v : b) v = nd(gen);
    const auto fast = convolve(a, b);
    REQUIRE(fast.size() == a.size() + b.size() - 1);
    for (std::size_t n = 0; n < fast.size(); ++n) {
      double ref = 0.0;
      for (std::size_t i = 0; i < a.size(); ++i)
        if (n >= i && n - i < b.size()) ref += a[i] * b[n - i];
      CHECK(std::abs(fast[n] - ref) <= 1e-9);
    }
    std::vector<double> a3 = a;
    for (auto& v : a3) v *= 3.0;
    const auto scaled = convolve(a3, b);
    for (std::size_t n = 0; n < fast.size(); ++n) CHECK(std::abs(scaled[n] - 3.0 * fast[n]) <= 1e-9);
  }

  TEST_CASE("convolve_time checks rates") {
    Signal s, h;
    s.samples = {1.0, 2.0};
    h.samples = {1.0};
    h.sample_rate_hz = 8000;
    CHECK(code_of([&] { convolve_time(s, h); }) == Errc::SampleRateMismatch);
  }
}
