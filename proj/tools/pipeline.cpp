#include "pipeline.hpp"

#include <algorithm>
#include <cmath>

#include "nctf/baseline.hpp"
#include "nctf/error.hpp"
#include "nctf/framestack.hpp"
#include "nctf/integrated.hpp"
#include "nctf/weighted.hpp"

namespace nctf::cli {

std::string_view to_string(Method method) noexcept {
  switch (method) {
    case Method::nctf: return "nctf";
    case Method::integrated: return "integrated";
    case Method::weighted: return "weighted";
  }
  return "integrated";
}

Method parse_method(std::string_view name) {
  if (name == "nctf") return Method::nctf;
  if (name == "integrated") return Method::integrated;
  if (name == "weighted") return Method::weighted;
  throw Error(Errc::InvalidConfig, "unknown method '" + std::string(name) + "'");
}

RunSettings default_settings(Method method, BasisMode variant, bool temporal) {
  RunSettings s;
  s.method = method;
  s.temporal = temporal;
  s.engine.basis_mode = method == Method::nctf ? BasisMode::online : variant;
  s.engine.iterations = method == Method::weighted ? 70 : 20;
  const bool overcomplete = s.engine.basis_mode == BasisMode::fixed_overcomplete;
  s.engine.rank = overcomplete ? 3000 : 100;
  s.engine.rho = overcomplete ? 0.45 : 0.75;
  s.engine.t_st = temporal ? 6 : 1;
  return s;
}

nlohmann::json to_json(const RunSettings& s) {
  const EngineConfig& e = s.engine;
  nlohmann::json j;
  j["method"] = std::string(to_string(s.method));
  j["variant"] = std::string(to_string(e.basis_mode));
  j["temporal"] = s.temporal;
  j["frame_ms"] = s.frame_ms;
  j["sample_rate_hz"] = s.sample_rate_hz;
  j["rank"] = e.rank;
  j["iterations"] = e.iterations;
  j["lh"] = e.lh;
  j["power_p"] = e.power_p;
  j["lambda"] = e.lambda ? nlohmann::json(*e.lambda) : nlohmann::json(nullptr);
  j["phi_x"] = e.phi_x;
  j["eps"] = e.eps;
  j["seed"] = e.seed;
  j["t_st"] = e.t_st;
  j["rho"] = e.rho;
  j["nmf_init_iterations"] = e.nmf_init_iterations;
  j["pure_mode"] = e.pure_mode;
  return j;
}

void set_numeric(RunSettings& s, const std::string& key, double v) {
  EngineConfig& e = s.engine;
  auto as_int = [&] {
    if (v != std::floor(v)) throw Error(Errc::InvalidConfig, key + " must be an integer");
    return static_cast<int>(v);
  };
  if (key == "rho") e.rho = v;
  else if (key == "lambda") e.lambda = v;
  else if (key == "phi_x") e.phi_x = v;
  else if (key == "eps") e.eps = v;
  else if (key == "frame_ms") s.frame_ms = v;
  else if (key == "iterations") e.iterations = as_int();
  else if (key == "lh") e.lh = as_int();
  else if (key == "power_p" || key == "power") e.power_p = as_int();
  else if (key == "rank") e.rank = as_int();
  else if (key == "t_st") e.t_st = as_int();
  else if (key == "nmf_init_iterations") e.nmf_init_iterations = as_int();
  else if (key == "sample_rate_hz") s.sample_rate_hz = as_int();
  else if (key == "seed") e.seed = static_cast<std::uint64_t>(as_int());
  else throw Error(Errc::InvalidConfig, "unknown numeric setting '" + key + "'");
}

void apply_json(RunSettings& s, const nlohmann::json& doc) {
  if (!doc.is_object()) throw Error(Errc::InvalidConfig, "config must be a JSON object");
  for (const auto& [key, value] : doc.items()) {
    if (key == "method" || key == "variant" || key == "temporal") continue;
    if (key == "pure_mode") {
      if (!value.is_boolean()) throw Error(Errc::InvalidConfig, "pure_mode must be boolean");
      s.engine.pure_mode = value.get<bool>();
    } else if (key == "lambda" && value.is_null()) {
      s.engine.lambda.reset();
    } else if (key == "seed" && value.is_number_unsigned()) {
      s.engine.seed = value.get<std::uint64_t>();
    } else if (value.is_number()) {
      set_numeric(s, key, value.get<double>());
    } else {
      throw Error(Errc::InvalidConfig, "unsupported config entry '" + key + "'");
    }
  }
}

DereverbOutcome dereverberate(const Signal& input, const RunSettings& settings,
                              const std::optional<Matrix>& basis) {
  require_sample_rate(input, settings.sample_rate_hz);
  EngineConfig engine = settings.engine;
  if (settings.temporal && settings.method != Method::integrated) {
    throw Error(Errc::InvalidConfig, "temporal stacking is only available for the integrated method");
  }
  if (settings.method != Method::nctf && engine.fixed_basis()) {
    if (!basis) throw Error(Errc::InvalidConfig, "fixed-basis variants need a basis file");
    engine.rank = static_cast<int>(basis->cols());
  }
  const std::optional<Matrix> no_basis;
  const auto& used_basis = engine.fixed_basis() ? basis : no_basis;

  const auto spec = stft_forward(input, settings.stft());
  const Matrix y = magnitude(spec).values;

  DereverbOutcome out;
  Matrix gain;
  switch (settings.method) {
    case Method::nctf: {
      auto r = run_baseline(y, engine);
      gain = std::move(r.gain);
      out.report = std::move(r.report);
      out.lambda = r.lambda;
      break;
    }
    case Method::integrated: {
      auto r = settings.temporal && engine.t_st > 1 ? run_stacked(y, engine, used_basis)
                                                    : run_integrated(y, engine, used_basis);
      gain = std::move(r.gain);
      out.report = std::move(r.report);
      out.lambda = r.lambda;
      break;
    }
    case Method::weighted: {
      auto r = run_weighted(y, engine, used_basis);
      gain = std::move(r.gain);
      out.report = std::move(r.report);
      out.lambda = r.lambda;
      break;
    }
  }
  out.output = apply_gain_and_synthesize(spec, gain, engine.power_p);
  return out;
}

MetricReport evaluate_pair(const Signal& clean, const Signal& test, double frame_ms) {
  require_sample_rate(test, clean.sample_rate_hz);
  const std::size_t len = std::min(clean.size(), test.size());
  Signal a = clean, b = test;
  a.samples.resize(len);
  b.samples.resize(len);
  const auto config = StftConfig::from_ms(frame_ms, clean.sample_rate_hz, 1);
  const Matrix sa = magnitude(stft_forward(a, config)).values;
  const Matrix sb = magnitude(stft_forward(b, config)).values;
  MetricReport report;
  report.kl_fit = kl_fit(sa, sb);
  report.lsd_db = log_spectral_distance(sa, sb);
  report.cd = cepstral_distance(a, b);
  return report;
}

std::vector<std::filesystem::path> list_wavs(const std::filesystem::path& corpus) {
  namespace fs = std::filesystem;
  std::vector<fs::path> files;
  if (fs::is_regular_file(corpus)) return {corpus};
  if (!fs::is_directory(corpus)) {
    throw Error(Errc::EmptyCorpus, corpus.string() + " is not a file or directory");
  }
  for (const auto& entry : fs::directory_iterator(corpus)) {
    auto ext = entry.path().extension().string();
    std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char c) { return std::tolower(c); });
    if (entry.is_regular_file() && ext == ".wav") files.push_back(entry.path());
  }
  std::sort(files.begin(), files.end());
  return files;
}

}  // namespace nctf::cli
