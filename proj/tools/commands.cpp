#include "commands.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include <CLI11.hpp>

#include "nctf/error.hpp"
#include "nctf/framestack.hpp"
#include "nctf/nmf.hpp"
#include "nctf/rir.hpp"
#include "nctf/scene.hpp"
#include "pipeline.hpp"

#ifndef NCTF_VERSION_STRING
#define NCTF_VERSION_STRING "unknown"
#endif

namespace nctf::cli {
namespace {

namespace fs = std::filesystem;

void ensure_parent(const fs::path& path) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
}

std::ofstream open_out(const fs::path& path) {
  ensure_parent(path);
  std::ofstream os(path, std::ios::binary);
  if (!os) throw Error(Errc::IoFailure, "cannot open " + path.string() + " for writing");
  return os;
}

fs::path with_suffix(const fs::path& base, const std::string& suffix) {
  fs::path p = base;
  p.replace_extension();
  p += suffix;
  return p;
}

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

struct SweepSpec {
  std::string key;
  std::vector<double> values;
};

SweepSpec parse_sweep(const std::string& text) {
  const auto eq = text.find('=');
  const auto c1 = text.find(':', eq == std::string::npos ? 0 : eq);
  const auto c2 = c1 == std::string::npos ? c1 : text.find(':', c1 + 1);
  if (eq == std::string::npos || c1 == std::string::npos || c2 == std::string::npos) {
    throw Error(Errc::InvalidConfig, "sweep must look like name=start:stop:step");
  }
  SweepSpec s;
  s.key = text.substr(0, eq);
  double start = 0, stop = 0, step = 0;
  try {
    start = std::stod(text.substr(eq + 1, c1 - eq - 1));
    stop = std::stod(text.substr(c1 + 1, c2 - c1 - 1));
    step = std::stod(text.substr(c2 + 1));
  } catch (const std::exception&) {
    throw Error(Errc::InvalidConfig, "sweep bounds must be numbers: " + text);
  }
  if (!(step > 0.0) || stop < start) throw Error(Errc::InvalidConfig, "empty sweep range");
  // Index-based so that the grid does not accumulate rounding error.
  for (int i = 0;; ++i) {
    const double v = start + i * step;
    if (v > stop + 1e-9 * step) break;
    s.values.push_back(v);
  }
  return s;
}

// Flag values that, when given, override the config file.
struct DereverbFlags {
  std::vector<std::string> inputs;
  std::string output;
  std::string report;
  std::string metadata;
  std::string basis;
  std::string config;
  std::string sweep;
  std::string reference;
  std::optional<std::string> method;
  std::optional<std::string> variant;
  bool temporal = false;
  std::optional<int> t_st;
  std::optional<double> rho, lambda, phi_x, frame_ms;
  std::optional<int> iterations, power, lh, rank;
  std::optional<std::uint64_t> seed;
  bool pure_mode = false;
};

RunSettings resolve_settings(const DereverbFlags& f) {
  nlohmann::json doc = nlohmann::json::object();
  if (!f.config.empty()) {
    std::ifstream is(f.config);
    if (!is) throw Error(Errc::IoFailure, "cannot read config " + f.config);
    try {
      doc = nlohmann::json::parse(is);
    } catch (const nlohmann::json::exception& e) {
      throw Error(Errc::InvalidConfig, f.config + ": " + e.what());
    }
    if (!doc.is_object()) throw Error(Errc::InvalidConfig, "config must be a JSON object");
  }
  auto doc_string = [&](const char* key, const char* fallback) {
    return doc.contains(key) ? doc[key].get<std::string>() : std::string(fallback);
  };
  const Method method = parse_method(f.method.value_or(doc_string("method", "integrated")));
  const BasisMode variant = parse_basis_mode(f.variant.value_or(doc_string("variant", "online")));
  const bool temporal = f.temporal || doc.value("temporal", false);

  RunSettings s = default_settings(method, variant, temporal);
  apply_json(s, doc);
  EngineConfig& e = s.engine;
  if (f.rho) e.rho = *f.rho;
  if (f.lambda) e.lambda = *f.lambda;
  if (f.phi_x) e.phi_x = *f.phi_x;
  if (f.frame_ms) s.frame_ms = *f.frame_ms;
  if (f.iterations) e.iterations = *f.iterations;
  if (f.power) e.power_p = *f.power;
  if (f.lh) e.lh = *f.lh;
  if (f.rank) e.rank = *f.rank;
  if (f.seed) e.seed = *f.seed;
  if (f.t_st) e.t_st = *f.t_st;
  if (f.pure_mode) e.pure_mode = true;
  if (!s.temporal) e.t_st = 1;
  return s;
}

std::optional<Matrix> load_basis_for(const RunSettings& s, const std::string& path) {
  if (s.method == Method::nctf || !s.engine.fixed_basis()) return std::nullopt;
  if (path.empty()) {
    throw Error(Errc::InvalidConfig,
                std::string("variant '") + std::string(to_string(s.engine.basis_mode)) +
                    "' needs --basis");
  }
  if (!fs::exists(path)) throw Error(Errc::IoFailure, "basis file not found: " + path);
  return load_basis(path);
}

void write_metadata(const fs::path& path, const RunSettings& s, const DereverbFlags& f,
                    const std::string& input, const fs::path& output,
                    const DereverbOutcome& outcome) {
  nlohmann::json meta;
  meta["version"] = NCTF_VERSION_STRING;
  meta["command"] = "dereverb";
  meta["input"] = input;
  meta["output"] = output.string();
  meta["basis"] = f.basis;
  meta["config"] = to_json(s);
  meta["frame_len"] = s.stft().frame_len;
  meta["resolved_lambda"] = outcome.lambda;
  meta["iterations_run"] = outcome.report.iterations_run;
  meta["final_kl"] = outcome.report.final_kl;
  auto os = open_out(path);
  os << meta.dump(2) << '\n';
}

int cmd_dereverb(const DereverbFlags& f) {
  const RunSettings base = resolve_settings(f);
  const auto basis = load_basis_for(base, f.basis);

  if (!f.sweep.empty()) {
    if (f.inputs.size() != 1) throw Error(Errc::InvalidConfig, "sweep takes one input");
    const SweepSpec sweep = parse_sweep(f.sweep);
    const Signal input = read_wav(f.inputs.front());
    std::optional<Signal> reference;
    if (!f.reference.empty()) reference = read_wav(f.reference);
    auto os = open_out(f.output);
    os << "param,value,iterations_run,final_cost,final_kl,lsd_db,cd\n";
    for (double v : sweep.values) {
      RunSettings s = base;
      set_numeric(s, sweep.key, v);
      const auto outcome = dereverberate(input, s, basis);
      os << sweep.key << ',' << fmt(v) << ',' << outcome.report.iterations_run << ','
         << fmt(outcome.report.cost_trace.back().total) << ',' << fmt(outcome.report.final_kl);
      if (reference) {
        const auto m = evaluate_pair(*reference, outcome.output, s.frame_ms);
        os << ',' << fmt(m.lsd_db) << ',' << fmt(m.cd) << '\n';
      } else {
        os << ",,\n";
      }
    }
    return 0;
  }

  const bool many = f.inputs.size() > 1;
  for (const auto& in : f.inputs) {
    const fs::path out_wav =
        many ? fs::path(f.output) / (fs::path(in).stem().string() + "_dereverb.wav")
             : fs::path(f.output);
    const Signal input = read_wav(in);
    const auto outcome = dereverberate(input, base, basis);
    ensure_parent(out_wav);
    write_wav(outcome.output, out_wav);
    {
      const fs::path report =
          !many && !f.report.empty() ? fs::path(f.report) : with_suffix(out_wav, ".fit.csv");
      auto os = open_out(report);
      outcome.report.write_csv(os);
    }
    const fs::path meta =
        !many && !f.metadata.empty() ? fs::path(f.metadata) : with_suffix(out_wav, ".run.json");
    write_metadata(meta, base, f, in, out_wav, outcome);
  }
  return 0;
}

struct TrainFlags {
  std::string corpus;
  std::string output;
  std::string mode = "lowrank";
  std::optional<int> rank;
  int iterations = 100;
  std::uint64_t seed = 1;
  double frame_ms = 64.0;
  int power = 1;
  int t_st = 1;
  int sample_rate_hz = kDefaultSampleRate;
};

int cmd_train_basis(const TrainFlags& f) {
  const BasisMode mode = parse_basis_mode(f.mode);
  if (mode == BasisMode::online) throw Error(Errc::InvalidConfig, "mode must be lowrank or overcomplete");
  const auto config = StftConfig::from_ms(f.frame_ms, f.sample_rate_hz, f.power);
  std::vector<Matrix> specs;
  for (const auto& path : list_wavs(f.corpus)) {
    Signal sig;
    try {
      sig = read_wav(path);
      require_sample_rate(sig, f.sample_rate_hz);
    } catch (const Error& e) {
      std::cerr << "skipping " << path.string() << ": " << e.what() << '\n';
      continue;
    }
    const Matrix y = magnitude(stft_forward(sig, config)).values;
    specs.push_back(f.t_st > 1 ? stack(y, f.t_st).values : y);
  }
  if (specs.empty()) throw Error(Errc::EmptyCorpus, "no readable WAV files in " + f.corpus);
  const int rank = f.rank.value_or(mode == BasisMode::fixed_overcomplete ? 3000 : 100);
  const Matrix w = mode == BasisMode::fixed_lowrank
                       ? train_basis_offline(specs, rank, f.iterations, f.seed)
                       : sample_overcomplete_basis(specs, rank, f.seed);
  ensure_parent(f.output);
  save_basis(w, f.output);
  return 0;
}

struct SceneFlags {
  std::string clean;
  std::string prefix;
  double t60 = 0.68;
  double drr_db = 0.0;
  std::optional<double> snr_db;
  std::uint64_t seed = 1;
  double rir_seconds = 1.0;
};

int cmd_make_scene(const SceneFlags& f) {
  const Signal clean = read_wav(f.clean);
  RirSpec spec;
  spec.t60 = f.t60;
  spec.drr_db = f.drr_db;
  spec.seed = f.seed;
  spec.sample_rate_hz = clean.sample_rate_hz;
  spec.length = static_cast<std::size_t>(std::lround(f.rir_seconds * clean.sample_rate_hz));
  const Signal rir = synthesize_rir(spec);

  Signal reverb = convolve_time(clean, rir);
  reverb.samples.resize(clean.size());
  if (f.snr_db) {
    const auto noise = speech_shaped_noise(clean, reverb.size(), f.seed + 1);
    const auto scaled = scale_to_snr(reverb.samples, noise, *f.snr_db);
    for (std::size_t n = 0; n < reverb.size(); ++n) reverb.samples[n] += scaled[n];
  }
  double peak = 0.0;
  for (double v : reverb.samples) peak = std::max(peak, std::abs(v));
  if (peak > 0.999) {
    std::cerr << "scaling scene by " << 0.999 / peak << " to avoid clipping\n";
    for (double& v : reverb.samples) v *= 0.999 / peak;
  }

  // The stored RIR is peak-normalized to fit PCM16; the scene uses the exact one.
  Signal rir_file = rir;
  for (double& v : rir_file.samples) v *= 0.5;
  ensure_parent(fs::path(f.prefix));
  write_wav(rir_file, fs::path(f.prefix + "_rir.wav"));
  write_wav(reverb, fs::path(f.prefix + (f.snr_db ? "_noisy.wav" : "_reverb.wav")));
  return 0;
}

struct EvalFlags {
  std::string clean;
  std::string reverberant;
  std::vector<std::string> processed;
  std::string output;
  double frame_ms = 64.0;
};

int cmd_evaluate(const EvalFlags& f) {
  const Signal clean = read_wav(f.clean);
  std::vector<MetricReport> rows;
  std::optional<MetricReport> ref_row;
  if (!f.reverberant.empty()) {
    ref_row = evaluate_pair(clean, read_wav(f.reverberant), f.frame_ms);
    ref_row->file = f.reverberant;
    ref_row->method = "reverberant";
    rows.push_back(*ref_row);
  }
  for (const auto& path : f.processed) {
    MetricReport r = evaluate_pair(clean, read_wav(path), f.frame_ms);
    r.file = path;
    r.method = fs::path(path).stem().string();
    rows.push_back(r);
  }
  auto os = open_out(f.output);
  os << "file,method,kl_fit,lsd_db,cd,delta_kl_fit,delta_lsd_db,delta_cd\n";
  for (const auto& r : rows) {
    os << r.file << ',' << r.method << ',' << fmt(r.kl_fit) << ',' << fmt(r.lsd_db) << ','
       << fmt(r.cd);
    if (ref_row) {
      os << ',' << fmt(r.kl_fit - ref_row->kl_fit) << ',' << fmt(r.lsd_db - ref_row->lsd_db)
         << ',' << fmt(r.cd - ref_row->cd) << '\n';
    } else {
      os << ",,,\n";
    }
  }
  return 0;
}

struct SynthFlags {
  std::string output;
  double seconds = 3.0;
  std::uint64_t seed = 1;
};

}  // namespace

int run(int argc, char** argv) {
  CLI::App app{"Speech dereverberation with non-negative convolutive transfer functions"};
  app.set_version_flag("--version", NCTF_VERSION_STRING);
  app.require_subcommand(1);

  DereverbFlags df;
  auto* dereverb = app.add_subcommand("dereverb", "Dereverberate WAV files");
  dereverb->add_option("inputs", df.inputs, "Reverberant input WAV(s)")->required();
  dereverb->add_option("-o,--output", df.output,
                       "Output WAV (a directory for several inputs, the CSV for --sweep)")
      ->required();
  dereverb->add_option("--report", df.report, "Cost trace CSV (default <output>.fit.csv)");
  dereverb->add_option("--metadata", df.metadata, "Run metadata JSON (default <output>.run.json)");
  dereverb->add_option("--method", df.method, "nctf | integrated | weighted");
  dereverb->add_option("--variant", df.variant, "online | lowrank | overcomplete");
  dereverb->add_option("--basis", df.basis, "Basis file for fixed variants");
  dereverb->add_flag("--temporal", df.temporal, "Frame stacking (integrated method)");
  dereverb->add_option("--tst", df.t_st, "Stacked frames when --temporal (default 6)");
  dereverb->add_option("--rho", df.rho, "Weight of the spectral model term");
  dereverb->add_option("--iterations", df.iterations, "Sweeps");
  dereverb->add_option("--frame-ms", df.frame_ms, "STFT frame length in ms (default 64)");
  dereverb->add_option("--power", df.power, "Spectrogram power p (1 or 2)");
  dereverb->add_option("--lambda", df.lambda, "Sparsity weight (default: data-scaled)");
  dereverb->add_option("--phi-x", df.phi_x, "Activation sharpening exponent");
  dereverb->add_option("--lh", df.lh, "RIR length in frames");
  dereverb->add_option("--rank", df.rank, "Basis size for the online variant");
  dereverb->add_option("--seed", df.seed, "Initialization seed");
  dereverb->add_flag("--pure-mode", df.pure_mode, "Disable normalization, clamping and sharpening");
  dereverb->add_option("--config", df.config, "Flat JSON config; flags take precedence");
  dereverb->add_option("--sweep", df.sweep, "name=start:stop:step parameter sweep");
  dereverb->add_option("--reference", df.reference, "Clean WAV for sweep metrics");

  TrainFlags tf;
  auto* train = app.add_subcommand("train-basis", "Learn a fixed spectral basis");
  train->add_option("corpus", tf.corpus, "Directory of WAV files or a single WAV")->required();
  train->add_option("-o,--output", tf.output, "Basis file")->required();
  train->add_option("--mode", tf.mode, "lowrank | overcomplete");
  train->add_option("--rank", tf.rank, "Basis size (default 100 or 3000)");
  train->add_option("--iterations", tf.iterations, "NMF sweeps for lowrank");
  train->add_option("--seed", tf.seed, "Seed");
  train->add_option("--frame-ms", tf.frame_ms, "STFT frame length in ms");
  train->add_option("--power", tf.power, "Spectrogram power p");
  train->add_option("--tst", tf.t_st, "Stack frames, for use with --temporal");

  SceneFlags sf;
  auto* scene = app.add_subcommand("make-scene", "Build a synthetic reverberant scene");
  scene->add_option("clean", sf.clean, "Clean WAV")->required();
  scene->add_option("-o,--prefix", sf.prefix, "Output prefix")->required();
  scene->add_option("--t60", sf.t60, "Reverberation time in s");
  scene->add_option("--drr", sf.drr_db, "Direct-to-reverberation ratio in dB");
  scene->add_option("--snr", sf.snr_db, "Reverberant-signal-to-noise ratio in dB");
  scene->add_option("--rir-seconds", sf.rir_seconds, "RIR length in s");
  scene->add_option("--seed", sf.seed, "Seed");

  EvalFlags ef;
  auto* eval = app.add_subcommand("evaluate", "Score processed files against a clean reference");
  eval->add_option("clean", ef.clean, "Clean WAV")->required();
  eval->add_option("processed", ef.processed, "Processed WAVs");
  eval->add_option("--reverberant", ef.reverberant, "Unprocessed reverberant WAV");
  eval->add_option("-o,--output", ef.output, "Metrics CSV")->required();
  eval->add_option("--frame-ms", ef.frame_ms, "STFT frame length for spectral metrics");

  SynthFlags yf;
  auto* synth = app.add_subcommand("synth-speech", "Write a synthetic speech-like test signal");
  synth->add_option("-o,--output", yf.output, "Output WAV")->required();
  synth->add_option("--seconds", yf.seconds, "Duration");
  synth->add_option("--seed", yf.seed, "Seed");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  try {
    if (*dereverb) return cmd_dereverb(df);
    if (*train) return cmd_train_basis(tf);
    if (*scene) return cmd_make_scene(sf);
    if (*eval) return cmd_evaluate(ef);
    if (*synth) {
      ensure_parent(yf.output);
      write_wav(synthesize_speech_like(yf.seconds, yf.seed), yf.output);
      return 0;
    }
  } catch (const std::exception& e) {
    std::cerr << "nctf: " << e.what() << '\n';
    return 1;
  }
  return 1;
}

}  // namespace nctf::cli
