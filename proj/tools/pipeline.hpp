#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "nctf/config.hpp"
#include "nctf/metrics.hpp"
#include "nctf/signal_io.hpp"
#include "nctf/stft.hpp"

namespace nctf::cli {

enum class Method { nctf, integrated, weighted };

std::string_view to_string(Method method) noexcept;
Method parse_method(std::string_view name);

/// Everything needed to reproduce a dereverberation run.
struct RunSettings {
  Method method = Method::integrated;
  bool temporal = false;
  double frame_ms = 64.0;
  int sample_rate_hz = kDefaultSampleRate;
  EngineConfig engine;

  StftConfig stft() const {
    return StftConfig::from_ms(frame_ms, sample_rate_hz, engine.power_p);
  }
};

/// Paper-style defaults for a method/variant pair: 20 or 70 iterations,
/// rank 100 or 3000, rho 0.75 (0.45 with the overcomplete basis), 6 stacked
/// frames when temporal.
RunSettings default_settings(Method method, BasisMode variant, bool temporal);

/// Flat JSON view of the settings, readable back by apply_json.
nlohmann::json to_json(const RunSettings& settings);

/// Overrides fields present in a flat JSON object. method, variant and temporal
/// are ignored here; they select the defaults. Unknown keys throw InvalidConfig.
void apply_json(RunSettings& settings, const nlohmann::json& doc);

/// Sets one numeric field by its config name (rho, lambda, phi_x, iterations,
/// lh, power_p, rank, t_st, frame_ms, seed, nmf_init_iterations, eps).
void set_numeric(RunSettings& settings, const std::string& key, double value);

struct DereverbOutcome {
  Signal output;
  FitReport report;
  double lambda = 0.0;
};

/// STFT, engine, gain, resynthesis. basis is required for fixed variants.
DereverbOutcome dereverberate(const Signal& input, const RunSettings& settings,
                              const std::optional<Matrix>& basis);

/// Metrics of test against the clean reference, both trimmed to the shorter
/// length. Spectrogram metrics use magnitude spectra at the given frame length.
MetricReport evaluate_pair(const Signal& clean, const Signal& test, double frame_ms);

/// Sorted *.wav files of a directory, or the path itself if it is a file.
std::vector<std::filesystem::path> list_wavs(const std::filesystem::path& corpus);

}  // namespace nctf::cli
