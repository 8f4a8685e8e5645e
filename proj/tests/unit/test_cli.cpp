#include <doctest.h>

#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "commands.hpp"
#include "nctf/error.hpp"
#include "nctf/nmf.hpp"
#include "nctf/rir.hpp"
#include "nctf/scene.hpp"
#include "pipeline.hpp"
#include "temp_dir.hpp"

using namespace nctf;

namespace {

int run_cli(std::vector<std::string> args) {
  args.insert(args.begin(), "nctf");
  std::vector<char*> argv;
  for (auto& a : args) argv.push_back(a.data());
  return cli::run(static_cast<int>(argv.size()), argv.data());
}

std::vector<std::vector<std::string>> read_csv(const std::filesystem::path& path) {
  std::ifstream is(path);
  std::vector<std::vector<std::string>> rows;
  std::string line;
  while (std::getline(is, line)) {
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    if (!line.empty() && line.back() == ',') cells.emplace_back();
    rows.push_back(cells);
  }
  return rows;
}

// Two-second clean file and its reverberant scene.
struct Scene {
  TempDir dir;
  std::string clean, reverb;
  Scene() {
    clean = (dir / "clean.wav").string();
    write_wav(synthesize_speech_like(2.0, 5), clean);
    REQUIRE(run_cli({"make-scene", clean, "-o", (dir / "scene").string(), "--rir-seconds", "0.5"}) == 0);
    reverb = (dir / "scene_reverb.wav").string();
  }
};

}  // namespace

TEST_SUITE("cli") {
  TEST_CASE("settings defaults, JSON round trip and overrides") {
    const auto s = cli::default_settings(cli::Method::weighted, BasisMode::fixed_overcomplete, false);
    CHECK(s.engine.iterations == 70);
    CHECK(s.engine.rank == 3000);
    CHECK(s.engine.rho == 0.45);
    const auto t = cli::default_settings(cli::Method::integrated, BasisMode::online, true);
    CHECK(t.engine.t_st == 6);
    CHECK(t.engine.rank == 100);
    CHECK(t.stft().frame_len == 1024);

    cli::RunSettings copy = cli::default_settings(cli::Method::integrated, BasisMode::online, false);
    copy.engine.lambda = 0.3;
    copy.engine.phi_x = 1.1;
    copy.frame_ms = 32;
    cli::RunSettings back = cli::default_settings(cli::Method::integrated, BasisMode::online, false);
    cli::apply_json(back, cli::to_json(copy));
    CHECK(cli::to_json(back) == cli::to_json(copy));
    CHECK_THROWS_AS(cli::apply_json(back, nlohmann::json{{"bogus", 1}}), Error);
  }

  TEST_CASE("baseline dereverb writes WAV, descending pure trace and metadata") {
    Scene sc;
    const auto out = sc.dir / "out" / "nctf.wav";
    REQUIRE(run_cli({"dereverb", sc.reverb, "-o", out.string(), "--method", "nctf", "--pure-mode"}) == 0);
    const Signal y = read_wav(out);
    CHECK(y.size() == read_wav(sc.reverb).size());
    for (double v : y.samples) CHECK(std::isfinite(v));
    const auto trace = read_csv(sc.dir / "out" / "nctf.fit.csv");
    REQUIRE(trace.size() == 22);  // header plus 21 trace rows
    for (std::size_t i = 2; i < trace.size(); ++i) {
      const double prev = std::stod(trace[i - 1][1]), next = std::stod(trace[i][1]);
      CHECK(next <= prev + 1e-9 * std::abs(prev));
    }
    std::ifstream meta(sc.dir / "out" / "nctf.run.json");
    const auto j = nlohmann::json::parse(meta);
    CHECK(j["config"]["method"] == "nctf");
    CHECK(j["config"]["pure_mode"] == true);
    CHECK(j.contains("version"));
  }

  TEST_CASE("temporal integrated run and config reuse") {
    Scene sc;
    const auto out = sc.dir / "st.wav";
    REQUIRE(run_cli({"dereverb", sc.reverb, "-o", out.string(), "--temporal", "--iterations", "3",
                     "--rank", "20"}) == 0);
    std::ifstream meta(sc.dir / "st.run.json");
    const auto j = nlohmann::json::parse(meta);
    CHECK(j["config"]["t_st"] == 6);
    {
      std::ofstream cfg(sc.dir / "cfg.json");
      cfg << j["config"].dump();
    }
    const auto out2 = sc.dir / "st2.wav";
    REQUIRE(run_cli({"dereverb", sc.reverb, "-o", out2.string(), "--config", (sc.dir / "cfg.json").string()}) == 0);
    CHECK(read_wav(out).samples == read_wav(out2).samples);
  }

  TEST_CASE("lowrank without a basis fails cleanly") {
    Scene sc;
    CHECK(run_cli({"dereverb", sc.reverb, "-o", (sc.dir / "x.wav").string(), "--variant", "lowrank"}) != 0);
    CHECK(run_cli({"dereverb", sc.reverb, "-o", (sc.dir / "x.wav").string(), "--variant", "lowrank",
                   "--basis", (sc.dir / "missing.bin").string()}) != 0);
    CHECK_FALSE(std::filesystem::exists(sc.dir / "x.wav"));
  }

  TEST_CASE("train-basis, then use it") {
    Scene sc;
    const auto basis = sc.dir / "w.bin";
    REQUIRE(run_cli({"train-basis", sc.clean, "-o", basis.string(), "--rank", "8", "--iterations", "20"}) == 0);
    const Matrix w = load_basis(basis);
    CHECK(w.rows() == 513);
    CHECK(w.cols() == 8);
    CHECK((w.colwise().sum().array() - 1.0).abs().maxCoeff() < 1e-12);
    const auto basis2 = sc.dir / "w2.bin";
    REQUIRE(run_cli({"train-basis", sc.clean, "-o", basis2.string(), "--rank", "8", "--iterations", "20"}) == 0);
    CHECK(load_basis(basis2) == w);

    CHECK(run_cli({"train-basis", sc.clean, "-o", (sc.dir / "oc.bin").string(), "--mode", "overcomplete",
                   "--rank", "100000"}) != 0);
    CHECK(run_cli({"train-basis", (sc.dir / "nothing").string(), "-o", (sc.dir / "e.bin").string()}) != 0);

    REQUIRE(run_cli({"dereverb", sc.reverb, "-o", (sc.dir / "lr.wav").string(), "--variant", "lowrank",
                     "--basis", basis.string(), "--iterations", "3"}) == 0);
  }

  TEST_CASE("make-scene noise level") {
    TempDir dir;
    const Signal clean = synthesize_speech_like(2.0, 8);
    write_wav(clean, dir / "c.wav");
    REQUIRE(run_cli({"make-scene", (dir / "c.wav").string(), "-o", (dir / "a").string(), "--rir-seconds", "0.5"}) == 0);
    CHECK(std::filesystem::exists(dir / "a_reverb.wav"));
    CHECK_FALSE(std::filesystem::exists(dir / "a_noisy.wav"));

    // The measurement is made on the exact in-memory pipeline, before PCM16.
    RirSpec spec;
    spec.length = 8000;
    const Signal rir = synthesize_rir(spec);
    Signal reverb = convolve_time(clean, rir);
    reverb.samples.resize(clean.size());
    const auto noise = scale_to_snr(reverb.samples, speech_shaped_noise(clean, reverb.size(), 2), 10.0);
    CHECK(std::abs(10.0 * std::log10(energy(reverb.samples) / energy(noise)) - 10.0) <= 0.1);
    REQUIRE(run_cli({"make-scene", (dir / "c.wav").string(), "-o", (dir / "b").string(), "--snr", "10",
                     "--rir-seconds", "0.5"}) == 0);
    CHECK(std::filesystem::exists(dir / "b_noisy.wav"));
  }

  TEST_CASE("evaluate: self is zero, deltas and CSV round trip") {
    Scene sc;
    const auto out = sc.dir / "m.csv";
    REQUIRE(run_cli({"dereverb", sc.reverb, "-o", (sc.dir / "p.wav").string(), "--iterations", "5"}) == 0);
    REQUIRE(run_cli({"evaluate", sc.clean, "--reverberant", sc.reverb, sc.clean,
                     (sc.dir / "p.wav").string(), "-o", out.string()}) == 0);
    const auto rows = read_csv(out);
    REQUIRE(rows.size() == 4);
    CHECK(rows[0][0] == "file");
    const auto& reverb = rows[1];
    const auto& self = rows[2];
    for (int c = 2; c <= 4; ++c) CHECK(std::stod(self[c]) == 0.0);
    for (const auto& r : {rows[2], rows[3]})
      for (int c = 2; c <= 4; ++c)
        CHECK(std::stod(r[c + 3]) == std::stod(r[c]) - std::stod(reverb[c]));

    const auto m = cli::evaluate_pair(read_wav(sc.clean), read_wav(sc.dir / "p.wav"), 64.0);
    CHECK(std::stod(rows[3][3]) == m.lsd_db);
    CHECK(std::stod(rows[3][4]) == m.cd);
  }

  TEST_CASE("rho sweep writes one row per value") {
    Scene sc;
    const auto out = sc.dir / "sweep.csv";
    REQUIRE(run_cli({"dereverb", sc.reverb, "-o", out.string(), "--method", "weighted", "--iterations", "2",
                     "--rank", "10", "--sweep", "rho=0.2:0.8:0.3", "--reference", sc.clean}) == 0);
    const auto rows = read_csv(out);
    REQUIRE(rows.size() == 4);
    CHECK(std::stod(rows[1][1]) == 0.2);
    CHECK(std::stod(rows[3][1]) == doctest::Approx(0.8));
    CHECK(run_cli({"dereverb", sc.reverb, "-o", out.string(), "--sweep", "rho=1"}) != 0);
  }
}
