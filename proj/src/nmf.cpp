#include "nctf/nmf.hpp"

#include <array>
#include <cmath>
#include <cstring>
#include <fstream>
#include <string>
#include <vector>

#include "nctf/error.hpp"
#include "nctf/nctf_core.hpp"
#include "nctf/random.hpp"

namespace nctf {

namespace {

constexpr std::array<char, 6> kBasisMagic = {'N', 'C', 'T', 'F', 'W', '1'};

double activation_scale(const Matrix& v, Eigen::Index rank) {
  const double mean = v.size() > 0 ? v.mean() : 0.0;
  return (mean > 0.0 ? mean : 1.0) / static_cast<double>(rank);
}

void fill_positive(Matrix& m, Rng& rng, double scale) {
  double* p = m.data();
  for (Eigen::Index i = 0; i < m.size(); ++i) p[i] = (0.5 + rng.uniform()) * scale;
}

void write_u64(std::ostream& os, std::uint64_t v) {
  unsigned char b[8];
  for (int i = 0; i < 8; ++i) b[i] = static_cast<unsigned char>((v >> (8 * i)) & 0xFF);
  os.write(reinterpret_cast<const char*>(b), 8);
}

std::uint64_t read_u64(std::istream& is) {
  unsigned char b[8];
  if (!is.read(reinterpret_cast<char*>(b), 8)) throw Error(Errc::CorruptHeader, "truncated basis file");
  std::uint64_t v = 0;
  for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(b[i]) << (8 * i);
  return v;
}

Matrix concatenate(std::span<const Matrix> specs) {
  if (specs.empty()) throw Error(Errc::EmptyTrainingSet, "no training spectrograms");
  const Eigen::Index rows = specs.front().rows();
  Eigen::Index frames = 0;
  for (const Matrix& s : specs) {
    if (s.rows() != rows) {
      throw Error(Errc::DimensionMismatch, "training spectrograms have " + std::to_string(rows) +
                                               " and " + std::to_string(s.rows()) + " rows");
    }
    frames += s.cols();
  }
  Matrix all(rows, frames);
  Eigen::Index offset = 0;
  for (const Matrix& s : specs) {
    all.middleCols(offset, s.cols()) = s;
    offset += s.cols();
  }
  return all;
}

}  // namespace

NmfModel nmf_initialize(const Matrix& v, Eigen::Index rank, std::uint64_t seed) {
  if (rank < 1) throw Error(Errc::InvalidRank, "rank must be >= 1");
  Rng rng(seed);
  NmfModel model{Matrix(v.rows(), rank), Matrix(rank, v.cols())};
  fill_positive(model.w, rng, 1.0);
  fill_positive(model.x, rng, activation_scale(v, rank));
  return model;
}

Matrix nmf_initialize_activations(const Matrix& v, const Matrix& w, std::uint64_t seed) {
  if (w.rows() != v.rows()) {
    throw Error(Errc::DimensionMismatch, "basis has " + std::to_string(w.rows()) +
                                             " rows, data has " + std::to_string(v.rows()));
  }
  if (w.cols() < 1) throw Error(Errc::InvalidRank, "empty basis");
  Rng rng(seed);
  Matrix x(w.cols(), v.cols());
  fill_positive(x, rng, activation_scale(v, w.cols()));
  return x;
}

void nmf_refine(const Matrix& v, NmfModel& model, int iterations, bool update_w, double eps) {
  if (model.w.rows() != v.rows() || model.x.cols() != v.cols() ||
      model.w.cols() != model.x.rows()) {
    throw Error(Errc::DimensionMismatch, "nmf_refine: model does not match data");
  }
  for (int it = 0; it < iterations; ++it) {
    Matrix ratio = v.array() / ((model.w * model.x).array() + eps);
    const Vector w_colsum = model.w.colwise().sum().transpose();
    Matrix num = model.w.transpose() * ratio;
    model.x.array() *= num.array().colwise() / (w_colsum.array() + eps);

    if (!update_w) continue;
    ratio = v.array() / ((model.w * model.x).array() + eps);
    const Eigen::RowVectorXd x_rowsum = model.x.rowwise().sum().transpose();
    num = ratio * model.x.transpose();
    model.w.array() *= num.array().rowwise() / (x_rowsum.array() + eps);
  }
}

NmfModel nmf_factorize(const Matrix& v, Eigen::Index rank, int iterations, std::uint64_t seed) {
  if (rank < 1) throw Error(Errc::InvalidRank, "rank must be >= 1");
  if (iterations < 0) throw Error(Errc::InvalidConfig, "iterations must be >= 0");
  NmfModel model = nmf_initialize(v, rank, seed);
  nmf_refine(v, model, iterations, true);
  return model;
}

Matrix train_basis_offline(std::span<const Matrix> training_specs, Eigen::Index rank,
                           int iterations, std::uint64_t seed) {
  const Matrix all = concatenate(training_specs);
  if (rank > all.cols()) {
    throw Error(Errc::InvalidRank, "rank " + std::to_string(rank) + " exceeds " +
                                       std::to_string(all.cols()) + " training frames");
  }
  NmfModel model = nmf_factorize(all, rank, iterations, seed);
  normalize_basis(model.w);
  return model.w;
}

Matrix sample_overcomplete_basis(std::span<const Matrix> training_specs, Eigen::Index rank,
                                 std::uint64_t seed) {
  const Matrix all = concatenate(training_specs);
  if (rank < 1) throw Error(Errc::InvalidRank, "rank must be >= 1");

  std::vector<Eigen::Index> active;
  for (Eigen::Index t = 0; t < all.cols(); ++t) {
    if (all.col(t).sum() > 0.0) active.push_back(t);
  }
  const auto n = static_cast<std::uint64_t>(active.size());
  if (n < static_cast<std::uint64_t>(rank)) {
    throw Error(Errc::InsufficientFrames, std::to_string(n) + " non-silent frames, rank " +
                                              std::to_string(rank));
  }

  Rng rng(seed);
  const std::uint64_t max_step = std::max<std::uint64_t>(1, n / static_cast<std::uint64_t>(rank));
  std::vector<bool> taken(n, false);
  std::uint64_t pos = rng.below(n);
  Matrix basis(all.rows(), rank);
  for (Eigen::Index r = 0; r < rank; ++r) {
    while (taken[pos]) pos = (pos + 1) % n;
    taken[pos] = true;
    basis.col(r) = all.col(active[pos]);
    pos = (pos + 1 + rng.below(max_step)) % n;
  }
  normalize_basis(basis);
  return basis;
}

void save_basis(const Matrix& w, const std::filesystem::path& path) {
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) throw Error(Errc::IoFailure, "cannot create " + path.string());
  os.write(kBasisMagic.data(), kBasisMagic.size());
  write_u64(os, static_cast<std::uint64_t>(w.rows()));
  write_u64(os, static_cast<std::uint64_t>(w.cols()));
  const double* p = w.data();
  for (Eigen::Index i = 0; i < w.size(); ++i) {
    std::uint64_t bits;
    std::memcpy(&bits, &p[i], sizeof bits);
    write_u64(os, bits);
  }
  if (!os) throw Error(Errc::IoFailure, "write failed: " + path.string());
}

Matrix load_basis(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw Error(Errc::IoFailure, "cannot open basis file " + path.string());
  std::array<char, 6> magic{};
  if (!is.read(magic.data(), magic.size()) || magic != kBasisMagic) {
    throw Error(Errc::CorruptHeader, "bad basis magic in " + path.string());
  }
  const std::uint64_t rows = read_u64(is);
  const std::uint64_t cols = read_u64(is);
  if (rows == 0 || cols == 0 || rows > (1u << 24) || cols > (1u << 24)) {
    throw Error(Errc::CorruptHeader, "implausible basis shape in " + path.string());
  }
  Matrix w(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
  double* p = w.data();
  for (Eigen::Index i = 0; i < w.size(); ++i) {
    const std::uint64_t bits = read_u64(is);
    std::memcpy(&p[i], &bits, sizeof bits);
  }
  return w;
}

}  // namespace nctf
