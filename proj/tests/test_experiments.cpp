#include "doctest.h"

#include <cmath>
#include <cstring>
#include <sstream>

#include "hsdoa/config.hpp"
#include "hsdoa/errors.hpp"
#include "hsdoa/experiments.hpp"
#include "hsdoa/waveform_io.hpp"
#include "json.hpp"
#include "support/gen.hpp"

using namespace hsdoa;
using hsdoa::testing::Gen;

namespace {

const std::string kConfigDir = HSDOA_CONFIG_DIR;

// 1-2 kHz chirp on a 0.1 s record: eight frequency pairs, cheap to run.
const std::string kSmallScene = R"(
[pulse]
f_l_hz = 1000.0
f_h_hz = 2000.0
t_s = 0.1
t_all_s = 0.1
fs_hz = 5000.0

[[target]]
theta_deg = -10.0

[[target]]
theta_deg = 20.0

[noise]
seed = 5
)";

ExperimentSpec small_spec(const std::string& experiment) {
  return parse_experiment(kSmallScene + "\n[experiment]\n" + experiment);
}

std::vector<std::string> lines(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream in(text);
  for (std::string l; std::getline(in, l);) out.push_back(l);
  return out;
}

}  // namespace

TEST_CASE("rmse") {
  CHECK(rmse({{0.0, 15.0}}, {{0.0, 15.0}}) == 0.0);
  CHECK(rmse({{3.0}}, {{4.0}}) == doctest::Approx(1.0));
  CHECK(rmse({{1.0}, {1.0}}, {{1.0}, {3.0}}) == doctest::Approx(std::sqrt(2.0)));
  // Rows are matched after sorting, so estimate order does not matter.
  CHECK(rmse({{0.0, 15.0}}, {{15.5, 0.5}}) == doctest::Approx(0.5));

  Gen gen(90, 0);
  std::vector<std::vector<double>> truth, est;
  double sum = 0.0;
  for (int i = 0; i < 30; ++i) {
    const double t1 = gen.uniform(-60.0, 0.0), t2 = gen.uniform(10.0, 60.0);
    const double e1 = gen.normal(), e2 = gen.normal();
    truth.push_back({t1, t2});
    est.push_back({t1 + e1, t2 + e2});
    sum += e1 * e1 + e2 * e2;
  }
  CHECK(rmse(truth, est) == doctest::Approx(std::sqrt(sum / 60.0)).epsilon(1e-12));

  CHECK_THROWS_AS(rmse({{1.0}}, {{1.0}, {2.0}}), ParameterError);
  CHECK_THROWS_AS(rmse({{1.0, 2.0}}, {{1.0}}), ParameterError);
  CHECK_THROWS_AS(rmse({}, {}), ParameterError);
}

TEST_CASE("quantization floor") {
  CHECK(quantization_floor(0.1) == doctest::Approx(0.05 / std::sqrt(3.0)));
  // Snapping uniform truths to the 0.1 deg grid reproduces the floor.
  Gen gen(91, 0);
  std::vector<std::vector<double>> truth, snapped;
  for (int i = 0; i < 20000; ++i) {
    const double t = gen.uniform(-30.0, 30.0);
    truth.push_back({t});
    snapped.push_back({std::round(t * 10.0) / 10.0});
  }
  CHECK(rmse(truth, snapped) == doctest::Approx(quantization_floor(0.1)).epsilon(0.02));
}

TEST_CASE("CsvTable") {
  const CsvTable t{"demo", {"a", "b"}, {{"1", "x"}, {"2", "y"}}};
  CHECK(t.str(true) == "a,b\n1,x\n2,y\n");
  const auto stamped = lines(t.str(false));
  REQUIRE(stamped.size() == 4);
  CHECK(stamped[0].rfind("# demo generated ", 0) == 0);
  CHECK(stamped[1] == "a,b");
  CHECK(format_number(0.5) == "0.5");
  CHECK(format_number(std::nan("")) == "nan");
}

TEST_CASE("bundled experiment files") {
  SUBCASE("scene") {
    const auto rc = load_run_config(kConfigDir + "/scene.toml");
    REQUIRE(rc.scene.targets.size() == 2);
    CHECK(rc.scene.seed == 7);
    REQUIRE(rc.snr_db);
    CHECK(*rc.snr_db == -14.0);
    CHECK(rc.scene.noise_power == doctest::Approx(std::pow(10.0, 1.4)));
    CHECK(rc.pipeline.targets == 2);
    CHECK(rc.pipeline.zeta_deg == 2.0);
  }
  SUBCASE("snr gain") {
    const auto s = load_experiment(kConfigDir + "/fig1.toml");
    CHECK(s.kind == ExperimentKind::kSnrGain);
    CHECK(s.trials == 200);
    CHECK(s.snr_db.size() == 9);
    CHECK(s.sigma_hz == std::vector<double>{1.0, 16.0, 32.0});
  }
  SUBCASE("spectra") {
    const auto s = load_experiment(kConfigDir + "/fig3.toml");
    CHECK(s.kind == ExperimentKind::kSpectra);
    CHECK(s.snr_db == std::vector<double>{-14.0});
  }
  SUBCASE("resolution sweep axis") {
    const auto s = load_experiment(kConfigDir + "/fig5.toml");
    CHECK(s.kind == ExperimentKind::kResolutionSweep);
    REQUIRE(s.theta2_deg.size() == 31);
    CHECK(s.theta2_deg[1] == 0.5);
    CHECK(s.theta2_deg[10] == 5.0);
    CHECK(s.theta2_deg[11] == 6.0);
    CHECK(s.theta2_deg.back() == 25.0);
    CHECK(s.algorithms.size() == 6);
  }
  SUBCASE("rmse sweep") {
    const auto s = load_experiment(kConfigDir + "/fig6.toml");
    CHECK(s.kind == ExperimentKind::kMcRmse);
    REQUIRE(s.snr_db.size() == 11);
    CHECK(s.snr_db.front() == -32.0);
    CHECK(s.snr_db.back() == 8.0);
    CHECK(s.base.scene.targets[1].theta_deg == 15.23);
    CHECK(s.algorithms.size() == 6);
  }
}

TEST_CASE("config errors") {
  auto bad_run = [](const std::string& text) { CHECK_THROWS_AS(parse_run_config(text), ParameterError); };
  bad_run("[geometry\n");
  bad_run("[geometry]\nm = 0\n");
  bad_run("[geometry]\nm = \"sixteen\"\n");
  bad_run("[[target]]\nb_re = 1.0\n");
  bad_run("[[target]]\ntheta_deg = 0.0\n[noise]\nsnr_db = 0.0\npower = 1.0\n");
  bad_run("[noise]\npower = -1.0\n");
  bad_run("[solver]\nmu = 0.0\n");
  bad_run("geometry = 3\n");
  CHECK_THROWS_AS(load_run_config(kConfigDir + "/missing.toml"), ParameterError);

  auto bad_exp = [](const std::string& exp) { CHECK_THROWS_AS(small_spec(exp), ParameterError); };
  bad_exp("kind = \"fig7\"\n");
  bad_exp("trials = 3\n");
  bad_exp("kind = \"mc-rmse\"\n");
  bad_exp("kind = \"mc-rmse\"\nsnr_db = 0.0\ntrials = 0\n");
  bad_exp("kind = \"mc-rmse\"\nsnr_db = { start = 0.0, stop = -1.0, step = 1.0 }\n");
  bad_exp("kind = \"mc-rmse\"\nsnr_db = { start = 0.0, stop = 1.0, step = 0.0 }\n");
  bad_exp("kind = \"mc-rmse\"\nsnr_db = [\"x\"]\n");
  bad_exp("kind = \"mc-rmse\"\nsnr_db = 0.0\nalgorithms = [\"fd-anm\"]\n");
  bad_exp("kind = \"snr-gain\"\nsnr_db = 0.0\n");
  bad_exp("kind = \"resolution-sweep\"\nsnr_db = 0.0\n");
  CHECK_THROWS_AS(parse_experiment(kSmallScene), ParameterError);
  CHECK_THROWS_AS(parse_experiment_kind("Spectra"), ParameterError);
  CHECK(parse_experiment_kind("resolution-sweep") == ExperimentKind::kResolutionSweep);
}

TEST_CASE("waveform files") {
  SampledWaveforms w;
  w.fs_hz = 5000.0;
  w.samples.resize(3, 7);
  for (Eigen::Index m = 0; m < 3; ++m)
    for (Eigen::Index n = 0; n < 7; ++n) w.samples(m, n) = 10.0 * m + n + 0.25;

  std::stringstream buf;
  write_waveforms(buf, w);
  const std::string raw = buf.str();
  REQUIRE(raw.size() == 24 + 21 * 8);
  std::uint64_t m = 0;
  double first = 0.0, second = 0.0;
  std::memcpy(&m, raw.data(), 8);
  std::memcpy(&first, raw.data() + 24, 8);
  std::memcpy(&second, raw.data() + 32, 8);
  CHECK(m == 3);
  CHECK(first == 0.25);
  CHECK(second == 1.25);  // row-major: sensor 0 sample 1 follows sample 0

  const auto back = read_waveforms(buf);
  CHECK(back.fs_hz == 5000.0);
  CHECK(back.samples == w.samples);

  std::stringstream truncated(raw.substr(0, raw.size() - 8));
  CHECK_THROWS_AS(read_waveforms(truncated), ParameterError);
  std::stringstream header_only(raw.substr(0, 12));
  CHECK_THROWS_AS(read_waveforms(header_only), ParameterError);
  std::string zero_rows = raw;
  std::memset(zero_rows.data(), 0, 8);
  std::stringstream zr(zero_rows);
  CHECK_THROWS_AS(read_waveforms(zr), ParameterError);
  CHECK_THROWS_AS(load_waveforms("/nonexistent/wave.bin"), ParameterError);
}

TEST_CASE("mc-rmse on a small scene") {
  const auto spec = small_spec(
      "kind = \"mc-rmse\"\ntrials = 3\nsnr_db = [10.0, 30.0]\n"
      "algorithms = [\"ptft-fdcbf\", \"ptft-hscfd\"]\n");
  const auto a = cmd_mc_rmse(spec, {.threads = 1});
  const auto b = cmd_mc_rmse(spec, {.threads = 3});
  CHECK(a.table().str(true) == b.table().str(true));
  CHECK(a.trial_table().str(true) == b.trial_table().str(true));

  REQUIRE(a.entries.size() == 4);
  CHECK(a.truth_deg == std::vector<double>{-10.0, 20.0});
  CHECK(a.floor_deg == doctest::Approx(quantization_floor(0.1)));
  CHECK(a.estimates.size() == 12);
  for (const auto& e : a.entries) {
    CHECK(e.trials == 3);
    if (e.failures < e.trials) CHECK(e.rmse_deg >= 0.0);
  }
  const auto* hs = a.find(AlgorithmId::kPtftHscfd, 30.0);
  REQUIRE(hs != nullptr);
  CHECK(hs->failures == 0);
  CHECK(hs->rmse_deg < 1.0);
  CHECK(a.find(AlgorithmId::kFftCfd, 30.0) == nullptr);

  const auto rows = lines(a.table().str(true));
  REQUIRE(rows.size() == 5);
  CHECK(rows[0] == "snr_db,algorithm,rmse_deg,trials,failures,floor_deg,seed,trial_range");
  CHECK(rows[1].find(",5,0..2") != std::string::npos);
  const auto trial_rows = lines(a.trial_table().str(true));
  CHECK(trial_rows[0] == "snr_db,algorithm,seed,trial,theta_hat1,theta_hat2");
  CHECK(trial_rows[3].rfind("10,ptft-fdcbf,5,2,", 0) == 0);
}

TEST_CASE("resolution sweep on a small scene") {
  const auto spec = small_spec(
      "kind = \"resolution-sweep\"\ntrials = 2\nsnr_db = 20.0\ntheta2_deg = [-10.0, 20.0]\n"
      "algorithms = [\"ptft-hscfd\"]\n");
  const auto r = cmd_resolution_sweep(spec, {.threads = 2});
  CHECK(r.theta1_deg == -10.0);
  REQUIRE(r.entries.size() == 2);
  const auto* same = r.find(AlgorithmId::kPtftHscfd, -10.0);
  REQUIRE(same != nullptr);
  CHECK_FALSE(same->resolved);
  const auto* far = r.find(AlgorithmId::kPtftHscfd, 20.0);
  REQUIRE(far != nullptr);
  CHECK(far->resolved);
  CHECK(r.minimum_resolvable(AlgorithmId::kPtftHscfd) == 30.0);
  CHECK_FALSE(r.minimum_resolvable(AlgorithmId::kFftCfd).has_value());
  CHECK(lines(r.table().str(true)).size() == 3);
}

TEST_CASE("snr gain and spectra on a small scene") {
  const auto gain = cmd_snr_gain(
      small_spec("kind = \"snr-gain\"\ntrials = 4\nsnr_db = [0.0, 10.0]\nsigma_hz = [20.0]\n"), {.threads = 2});
  CHECK(gain.rows.size() == 2 * 16);
  CHECK(gain.rows.front().sensor == 1);
  CHECK(std::isfinite(gain.mean_gain_db(20.0)));
  CHECK_THROWS_AS(gain.mean_gain_db(5.0), ParameterError);
  CHECK(lines(gain.table().str(true)).size() == 33);

  const auto spec = small_spec("kind = \"spectra\"\nsnr_db = 40.0\n");
  const auto s = cmd_spectra(spec, {.threads = 2});
  const std::size_t pairs = s.fft.size();
  CHECK(pairs == 8);
  CHECK(s.ptft.size() == pairs);
  CHECK(s.grid_deg.size() == 1801);
  REQUIRE(s.hscfd.theta_deg.size() == 2);
  CHECK(std::abs(s.hscfd.theta_deg[0] + 10.0) < 0.5);
  CHECK(std::abs(s.hscfd.theta_deg[1] - 20.0) < 0.5);
  CHECK(lines(s.table().str(true)).size() == 1 + (2 * pairs + 2) * 1801);
  CHECK(s.table().str(true) == cmd_spectra(spec, {.threads = 1}).table().str(true));
}

TEST_CASE("estimate_json") {
  auto rc = parse_run_config(kSmallScene);
  rc.scene.noise_power = scene_noise_power(rc.scene, 20.0);
  const auto j = nlohmann::json::parse(estimate_json(rc, AlgorithmId::kPtftHscfd, 4));
  CHECK(j["algorithm"] == "ptft-hscfd");
  CHECK(j["truth_deg"] == nlohmann::json({-10.0, 20.0}));
  CHECK(j["seed"] == 5);
  CHECK(j["trial"] == 4);
  CHECK(j["theta_deg"].size() == 2);
  CHECK(j.contains("ridge_time_s"));
  CHECK(j.contains("bins"));
  CHECK(estimate_json(rc, AlgorithmId::kPtftHscfd, 4) == j.dump(2));
}
