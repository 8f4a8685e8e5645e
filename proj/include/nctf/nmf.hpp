#pragma once

#include <cstdint>
#include <filesystem>
#include <span>

#include "nctf/stft.hpp"
#include "nctf/types.hpp"

namespace nctf {

/// S ~ W X with W: F x R basis and X: R x T activations.
struct NmfModel {
  Matrix w;
  Matrix x;

  Eigen::Index rank() const noexcept { return w.cols(); }
  Matrix product() const { return w * x; }
};

/// Seeded positive initialization. W entries are in [0.5, 1.5); X entries
/// are in [0.5, 1.5) times mean(v) / R so that W X starts near the data scale.
NmfModel nmf_initialize(const Matrix& v, Eigen::Index rank, std::uint64_t seed);

/// Activations only, for a fixed basis. Same scaling rule as nmf_initialize.
Matrix nmf_initialize_activations(const Matrix& v, const Matrix& w, std::uint64_t seed);

/// Standard multiplicative KL-NMF sweeps (X then W). W is held fixed when
/// update_w is false.
void nmf_refine(const Matrix& v, NmfModel& model, int iterations, bool update_w,
                double eps = kDefaultEps);

/// Throws InvalidRank if rank < 1 or iterations < 0.
NmfModel nmf_factorize(const Matrix& v, Eigen::Index rank, int iterations,
                       std::uint64_t seed);

/// Concatenates the spectrograms along time, factorizes, and returns the
/// column-normalized basis. Throws EmptyTrainingSet, DimensionMismatch or
/// InvalidRank (rank above the total frame count).
Matrix train_basis_offline(std::span<const Matrix> training_specs, Eigen::Index rank,
                           int iterations, std::uint64_t seed);

/// Picks rank distinct non-silent training frames by a seeded random walk:
/// uniform start, uniform forward steps in [1, max(1, frames / rank)],
/// wrapping, and skipping ahead past frames already taken. Columns are
/// normalized to sum to one. Throws InsufficientFrames.
Matrix sample_overcomplete_basis(std::span<const Matrix> training_specs,
                                 Eigen::Index rank, std::uint64_t seed);

/// Binary basis file: "NCTFW1", F and R as u64 LE, then F * R f64 LE values in
/// column-major order.
void save_basis(const Matrix& w, const std::filesystem::path& path);
Matrix load_basis(const std::filesystem::path& path);

}  // namespace nctf
