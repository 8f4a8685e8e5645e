#pragma once

#include <cstdint>

#include "nctf/signal_io.hpp"

namespace nctf {

/// Synthetic voiced/unvoiced syllable sequence with silent gaps, used as
/// clean test material. Peak amplitude is 0.5.
Signal synthesize_speech_like(double duration_s, std::uint64_t seed,
                              int sample_rate_hz = kDefaultSampleRate);

/// Gaussian noise whose long-term spectrum follows that of shape_source.
std::vector<double> speech_shaped_noise(const Signal& shape_source, std::size_t length,
                                        std::uint64_t seed);

/// Returns noise scaled so that 10 log10(energy(signal) / energy(noise)) == snr_db.
std::vector<double> scale_to_snr(std::span<const double> signal,
                                 std::span<const double> noise, double snr_db);

}  // namespace nctf
