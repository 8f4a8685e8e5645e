#include "nctf/signal_io.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <iterator>
#include <numeric>
#include <optional>

#include "nctf/error.hpp"
#include "nctf/fft.hpp"

namespace nctf {

namespace {

constexpr std::uint16_t kFormatPcm = 1;
constexpr std::uint16_t kFormatFloat = 3;
constexpr std::uint16_t kFormatExtensible = 0xFFFE;

std::uint16_t read_u16(const unsigned char* p) {
  return static_cast<std::uint16_t>(p[0] | (p[1] << 8));
}

std::uint32_t read_u32(const unsigned char* p) {
  return static_cast<std::uint32_t>(p[0]) | (static_cast<std::uint32_t>(p[1]) << 8) |
         (static_cast<std::uint32_t>(p[2]) << 16) | (static_cast<std::uint32_t>(p[3]) << 24);
}

void put_u16(std::vector<unsigned char>& out, std::uint16_t v) {
  out.push_back(static_cast<unsigned char>(v & 0xFF));
  out.push_back(static_cast<unsigned char>(v >> 8));
}

void put_u32(std::vector<unsigned char>& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<unsigned char>((v >> (8 * i)) & 0xFF));
}

void put_tag(std::vector<unsigned char>& out, const char (&tag)[5]) {
  out.insert(out.end(), tag, tag + 4);
}

struct FormatChunk {
  std::uint16_t format = 0;
  std::uint16_t channels = 0;
  std::uint32_t sample_rate = 0;
  std::uint16_t bits = 0;
};

}  // namespace

Signal read_wav(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(Errc::IoFailure, "cannot open " + path.string());
  const std::vector<unsigned char> bytes((std::istreambuf_iterator<char>(in)),
                                         std::istreambuf_iterator<char>());
  if (in.bad()) throw Error(Errc::IoFailure, "read failed: " + path.string());

  if (bytes.size() < 12 || std::memcmp(bytes.data(), "RIFF", 4) != 0 ||
      std::memcmp(bytes.data() + 8, "WAVE", 4) != 0) {
    throw Error(Errc::CorruptHeader, "not a RIFF/WAVE file: " + path.string());
  }

  std::optional<FormatChunk> fmt;
  const unsigned char* data = nullptr;
  std::size_t data_size = 0;

  std::size_t pos = 12;
  while (pos + 8 <= bytes.size()) {
    const unsigned char* chunk = bytes.data() + pos;
    const std::uint32_t size = read_u32(chunk + 4);
    const std::size_t body = pos + 8;
    // Some writers leave the data size unset or oversized; clip to the file.
    const std::size_t available = std::min<std::size_t>(size, bytes.size() - body);

    if (std::memcmp(chunk, "fmt ", 4) == 0) {
      if (size < 16 || available < 16) throw Error(Errc::CorruptHeader, "short fmt chunk");
      FormatChunk f;
      f.format = read_u16(chunk + 8);
      f.channels = read_u16(chunk + 10);
      f.sample_rate = read_u32(chunk + 12);
      f.bits = read_u16(chunk + 22);
      if (f.format == kFormatExtensible) {
        if (available < 40) throw Error(Errc::CorruptHeader, "short extensible fmt chunk");
        // First two bytes of the sub-format GUID carry the actual format tag.
        f.format = read_u16(chunk + 8 + 24);
      }
      fmt = f;
    } else if (std::memcmp(chunk, "data", 4) == 0) {
      data = bytes.data() + body;
      data_size = available;
    }
    pos = body + size + (size & 1u);
  }

  if (!fmt) throw Error(Errc::CorruptHeader, "missing fmt chunk");
  if (data == nullptr) throw Error(Errc::CorruptHeader, "missing data chunk");
  if (fmt->channels != 1) {
    throw Error(Errc::UnsupportedFormat,
                std::to_string(fmt->channels) + " channels; only mono is supported");
  }
  if (fmt->sample_rate == 0) throw Error(Errc::CorruptHeader, "zero sample rate");

  Signal signal;
  signal.sample_rate_hz = static_cast<int>(fmt->sample_rate);
  if (fmt->format == kFormatPcm && fmt->bits == 16) {
    const std::size_t n = data_size / 2;
    signal.samples.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
      const auto code = static_cast<std::int16_t>(read_u16(data + 2 * i));
      signal.samples[i] = static_cast<double>(code) / 32768.0;
    }
  } else if (fmt->format == kFormatFloat && fmt->bits == 32) {
    const std::size_t n = data_size / 4;
    signal.samples.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
      signal.samples[i] = static_cast<double>(std::bit_cast<float>(read_u32(data + 4 * i)));
    }
  } else {
    throw Error(Errc::UnsupportedFormat, "format tag " + std::to_string(fmt->format) + " with " +
                                             std::to_string(fmt->bits) + " bits");
  }
  if (signal.samples.empty()) throw Error(Errc::CorruptHeader, "no samples in " + path.string());
  return signal;
}

void write_wav(const Signal& signal, const std::filesystem::path& path) {
  for (double v : signal.samples) {
    if (!std::isfinite(v)) throw Error(Errc::NonFiniteSample, path.string());
  }
  if (signal.sample_rate_hz <= 0) throw Error(Errc::InvalidConfig, "sample rate must be positive");

  const auto n = static_cast<std::uint32_t>(signal.samples.size());
  const std::uint32_t data_bytes = 2 * n;
  const auto rate = static_cast<std::uint32_t>(signal.sample_rate_hz);

  std::vector<unsigned char> out;
  out.reserve(44 + data_bytes);
  put_tag(out, "RIFF");
  put_u32(out, 36 + data_bytes);
  put_tag(out, "WAVE");
  put_tag(out, "fmt ");
  put_u32(out, 16);
  put_u16(out, kFormatPcm);
  put_u16(out, 1);
  put_u32(out, rate);
  put_u32(out, rate * 2);
  put_u16(out, 2);
  put_u16(out, 16);
  put_tag(out, "data");
  put_u32(out, data_bytes);
  for (double v : signal.samples) {
    const double code = std::clamp(std::round(v * 32768.0), -32768.0, 32767.0);
    put_u16(out, static_cast<std::uint16_t>(static_cast<std::int16_t>(code)));
  }

  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) throw Error(Errc::IoFailure, "cannot create " + path.string());
  os.write(reinterpret_cast<const char*>(out.data()), static_cast<std::streamsize>(out.size()));
  if (!os) throw Error(Errc::IoFailure, "write failed: " + path.string());
}

void require_sample_rate(const Signal& signal, int expected_hz) {
  if (signal.sample_rate_hz != expected_hz) {
    throw Error(Errc::SampleRateMismatch, std::to_string(signal.sample_rate_hz) +
                                              " Hz, expected " + std::to_string(expected_hz) + " Hz");
  }
}

std::vector<double> convolve(std::span<const double> a, std::span<const double> b) {
  if (a.empty() || b.empty()) return {};
  const std::size_t out_len = a.size() + b.size() - 1;
  std::vector<double> out(out_len, 0.0);

  if (std::min(a.size(), b.size()) <= 64) {
    for (std::size_t i = 0; i < a.size(); ++i) {
      if (a[i] == 0.0) continue;
      for (std::size_t j = 0; j < b.size(); ++j) out[i + j] += a[i] * b[j];
    }
    return out;
  }

  const std::size_t n = std::bit_ceil(out_len);
  RealFft fft(n);
  std::vector<double> buf(n, 0.0);
  std::vector<std::complex<double>> fa(fft.bins()), fb(fft.bins());
  std::copy(a.begin(), a.end(), buf.begin());
  fft.forward(buf, fa);
  std::fill(buf.begin(), buf.end(), 0.0);
  std::copy(b.begin(), b.end(), buf.begin());
  fft.forward(buf, fb);
  for (std::size_t k = 0; k < fa.size(); ++k) fa[k] *= fb[k];
  fft.inverse(fa, buf);
  std::copy_n(buf.begin(), out_len, out.begin());
  return out;
}

Signal convolve_time(const Signal& signal, const Signal& rir) {
  require_sample_rate(rir, signal.sample_rate_hz);
  return Signal{convolve(signal.samples, rir.samples), signal.sample_rate_hz};
}

double energy(std::span<const double> x) {
  return std::inner_product(x.begin(), x.end(), x.begin(), 0.0);
}

}  // namespace nctf
