#include "hsdoa/experiments.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <limits>
#include <sstream>

#include "json.hpp"

#include "hsdoa/errors.hpp"
#include "hsdoa/parallel.hpp"

namespace hsdoa {
namespace {

constexpr double kResolveTolDeg = 1.0;

double median(std::vector<double> v) {
  if (v.empty()) return std::numeric_limits<double>::quiet_NaN();
  std::sort(v.begin(), v.end());
  const std::size_t h = v.size() / 2;
  return v.size() % 2 ? v[h] : 0.5 * (v[h - 1] + v[h]);
}

std::string trial_range(int trials) { return "0.." + std::to_string(trials - 1); }

Scene scene_at(const ExperimentSpec& spec, double snr_db) {
  Scene sc = spec.base.scene;
  sc.noise_power = scene_noise_power(sc, snr_db);
  return sc;
}

std::vector<double> sorted_truth(const Scene& sc) {
  std::vector<double> t;
  for (const auto& tg : sc.targets) t.push_back(tg.theta_deg);
  std::sort(t.begin(), t.end());
  return t;
}

PipelineConfig serial(PipelineConfig cfg, int targets) {
  cfg.threads = 1;
  cfg.targets = targets;
  return cfg;
}

}  // namespace

double rmse(const std::vector<std::vector<double>>& truth,
            const std::vector<std::vector<double>>& estimates) {
  if (truth.size() != estimates.size()) throw ParameterError("rmse: trial counts differ");
  if (truth.empty()) throw ParameterError("rmse: no trials");
  double sum = 0.0;
  std::size_t count = 0;
  for (std::size_t i = 0; i < truth.size(); ++i) {
    if (truth[i].size() != estimates[i].size() || truth[i].empty())
      throw ParameterError("rmse: per-trial target counts differ");
    auto t = truth[i];
    auto e = estimates[i];
    std::sort(t.begin(), t.end());
    std::sort(e.begin(), e.end());
    for (std::size_t k = 0; k < t.size(); ++k) sum += (t[k] - e[k]) * (t[k] - e[k]);
    count += t.size();
  }
  return std::sqrt(sum / static_cast<double>(count));
}

double quantization_floor(double grid_step_deg) { return 0.5 * grid_step_deg / std::sqrt(3.0); }

std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

std::string CsvTable::str(bool deterministic) const {
  std::ostringstream out;
  if (!deterministic) {
    const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    char stamp[32];
    std::strftime(stamp, sizeof stamp, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&now));
    out << "# " << title << " generated " << stamp << '\n';
  }
  for (std::size_t i = 0; i < header.size(); ++i) out << (i ? "," : "") << header[i];
  out << '\n';
  for (const auto& row : rows) {
    for (std::size_t i = 0; i < row.size(); ++i) out << (i ? "," : "") << row[i];
    out << '\n';
  }
  return out.str();
}

// ---------------------------------------------------------------- snr gain

CsvTable SnrGainReport::table() const {
  CsvTable t{"snr-gain",
             {"input_snr_db", "sigma_hz", "sensor", "snr_fft_db", "snr_ptft_db", "seed", "trials"},
             {}};
  for (const auto& r : rows)
    t.rows.push_back({format_number(r.input_snr_db), format_number(r.sigma_hz),
                      std::to_string(r.sensor), format_number(r.fft_db), format_number(r.ptft_db),
                      std::to_string(seed), trial_range(trials)});
  return t;
}

double SnrGainReport::mean_gain_db(double sigma_hz) const {
  double sum = 0.0;
  int n = 0;
  for (const auto& r : rows) {
    if (std::abs(r.sigma_hz - sigma_hz) > 1e-9) continue;
    sum += r.ptft_db - r.fft_db;
    ++n;
  }
  if (n == 0) throw ParameterError("no rows at the requested sigma");
  return sum / n;
}

SnrGainReport cmd_snr_gain(const ExperimentSpec& spec, const RunOptions& opts) {
  SnrGainReport rep;
  rep.seed = spec.base.scene.seed;
  rep.trials = spec.trials;
  Scene base = spec.base.scene;
  if (base.targets.empty()) base.targets.push_back({});
  struct Point {
    double sigma, snr;
  };
  std::vector<Point> points;
  for (const double s : spec.sigma_hz)
    for (const double snr : spec.snr_db) points.push_back({s, snr});
  std::vector<std::vector<SnrPair>> results(points.size());
  parallel_for(points.size(), opts.threads, [&](std::size_t i) {
    Scene sc = base;
    sc.noise_power = scene_noise_power(sc, points[i].snr);
    PtftConfig cfg = spec.base.pipeline.ptft;
    cfg.sigma_hz = points[i].sigma;
    results[i] = output_snr_gain(sc, cfg, spec.trials);
  });
  for (std::size_t i = 0; i < points.size(); ++i)
    for (std::size_t m = 0; m < results[i].size(); ++m)
      rep.rows.push_back({points[i].snr, points[i].sigma, static_cast<int>(m) + 1,
                          results[i][m].fft_db, results[i][m].ptft_db});
  return rep;
}

// ----------------------------------------------------------------- spectra

CsvTable SpectraReport::table() const {
  CsvTable t{"spectra", {"angle_deg", "value", "w", "f_w_hz", "estimator", "seed", "trial"}, {}};
  auto emit = [&](const DoaSpectrum& s, const std::string& tag) {
    for (Eigen::Index n = 0; n < s.values.size(); ++n)
      t.rows.push_back({format_number(grid_deg[static_cast<std::size_t>(n)]),
                        format_number(s.values[n]), std::to_string(s.w),
                        format_number(s.f_low_hz), tag, std::to_string(seed),
                        std::to_string(trial)});
  };
  for (const auto& s : fft) emit(s, "fft-cfd");
  for (const auto& s : ptft) emit(s, "ptft-cfd");
  emit(fft_average, "fft-cfd-avg");
  emit(ptft_average, "ptft-cfd-avg");
  return t;
}

SpectraReport cmd_spectra(const ExperimentSpec& spec, const RunOptions& opts) {
  Scene sc = spec.base.scene;
  if (!spec.snr_db.empty()) sc.noise_power = scene_noise_power(sc, spec.snr_db.front());
  sc.validate();
  PipelineConfig cfg = spec.base.pipeline;
  cfg.threads = opts.threads;
  cfg.keep_diagnostics = true;
  const Pipeline p(sc.geometry, sc.pulse, cfg);
  const auto spec_m = spectra(synthesize_received(sc, 0));

  SpectraReport rep;
  rep.seed = sc.seed;
  rep.trial = 0;
  rep.grid_deg = p.grid();
  const auto fft_snaps = p.fft_snapshots(spec_m);
  rep.fft = p.cfd_spectra(fft_snaps);
  for (auto& s : rep.fft) s.estimator = "fft-cfd";
  rep.fft_average = incoherent_average(rep.fft);
  auto hs = p.estimate(AlgorithmId::kPtftHscfd, p.ptft_snapshots(spec_m));
  rep.ptft = std::move(hs.diagnostics.per_w);
  rep.ptft_average = incoherent_average(rep.ptft);
  rep.hscfd = std::move(hs.estimate);
  return rep;
}

// ---------------------------------------------------------------- estimate

std::string estimate_json(const RunConfig& rc, AlgorithmId id, std::uint64_t trial) {
  rc.scene.validate();
  const Pipeline p(rc.scene.geometry, rc.scene.pulse, rc.pipeline);
  const auto res = p.run(id, synthesize_received(rc.scene, trial));
  auto j = nlohmann::json::parse(to_json(res.estimate));
  j["algorithm"] = std::string(to_string(id));
  j["truth_deg"] = sorted_truth(rc.scene);
  j["seed"] = rc.scene.seed;
  j["trial"] = trial;
  j["noise_power"] = rc.scene.noise_power;
  if (res.diagnostics.ridge) j["ridge_time_s"] = res.diagnostics.ridge->time_s;
  if (!res.diagnostics.warnings.empty()) j["warnings"] = res.diagnostics.warnings;
  return j.dump(2);
}

// -------------------------------------------------------------- resolution

CsvTable ResolutionReport::table() const {
  CsvTable t{"resolution-sweep",
             {"theta2", "algorithm", "theta_hat1", "theta_hat2", "resolved", "failures", "seed",
              "trials"},
             {}};
  for (const auto& e : entries)
    t.rows.push_back({format_number(e.theta2_deg), std::string(to_string(e.algorithm)),
                      format_number(e.theta_hat1), format_number(e.theta_hat2),
                      e.resolved ? "1" : "0", std::to_string(e.failures), std::to_string(seed),
                      trial_range(trials)});
  return t;
}

std::optional<double> ResolutionReport::minimum_resolvable(AlgorithmId id) const {
  std::optional<double> best;
  for (const auto& e : entries) {
    if (e.algorithm != id || !e.resolved) continue;
    const double sep = std::abs(e.theta2_deg - theta1_deg);
    if (!best || sep < *best) best = sep;
  }
  return best;
}

const ResolutionEntry* ResolutionReport::find(AlgorithmId id, double theta2_deg) const {
  for (const auto& e : entries)
    if (e.algorithm == id && std::abs(e.theta2_deg - theta2_deg) < 1e-9) return &e;
  return nullptr;
}

ResolutionReport cmd_resolution_sweep(const ExperimentSpec& spec, const RunOptions& opts) {
  const auto& first = spec.base.scene.targets.front();
  const Target second_template =
      spec.base.scene.targets.size() > 1 ? spec.base.scene.targets[1] : first;
  const double snr = spec.snr_db.empty() ? 0.0 : spec.snr_db.front();
  const bool noisy = !spec.snr_db.empty();

  ResolutionReport rep;
  rep.theta1_deg = first.theta_deg;
  rep.seed = spec.base.scene.seed;
  rep.trials = spec.trials;

  const auto cfg = serial(spec.base.pipeline, 2);
  const Pipeline p(spec.base.scene.geometry, spec.base.scene.pulse, cfg);
  const std::size_t n_alg = spec.algorithms.size();
  const std::size_t n_trials = static_cast<std::size_t>(spec.trials);
  const std::size_t jobs = spec.theta2_deg.size() * n_trials;
  // results[point][trial][alg]
  std::vector<std::vector<std::vector<double>>> results(jobs, std::vector<std::vector<double>>(n_alg));
  parallel_for(jobs, opts.threads, [&](std::size_t job) {
    Scene sc = spec.base.scene;
    Target second = second_template;
    second.theta_deg = spec.theta2_deg[job / n_trials];
    sc.targets = {first, second};
    sc.noise_power = noisy ? scene_noise_power(sc, snr) : spec.base.scene.noise_power;
    sc.validate();
    const auto out = p.run_many(spec.algorithms, synthesize_received(sc, job % n_trials));
    for (std::size_t a = 0; a < n_alg; ++a) results[job][a] = out.at(spec.algorithms[a]).estimate.theta_deg;
  });

  for (std::size_t pt = 0; pt < spec.theta2_deg.size(); ++pt) {
    const double th2 = spec.theta2_deg[pt];
    std::vector<double> truth{first.theta_deg, th2};
    std::sort(truth.begin(), truth.end());
    for (std::size_t a = 0; a < n_alg; ++a) {
      ResolutionEntry e;
      e.theta2_deg = th2;
      e.algorithm = spec.algorithms[a];
      std::vector<double> h1, h2;
      for (std::size_t t = 0; t < n_trials; ++t) {
        const auto& est = results[pt * n_trials + t][a];
        if (est.size() < 2) {
          ++e.failures;
          continue;
        }
        h1.push_back(est[0]);
        h2.push_back(est[1]);
      }
      e.theta_hat1 = median(h1);
      e.theta_hat2 = median(h2);
      e.resolved = truth[0] != truth[1] && !h1.empty() &&
                   std::abs(e.theta_hat1 - truth[0]) <= kResolveTolDeg &&
                   std::abs(e.theta_hat2 - truth[1]) <= kResolveTolDeg;
      rep.entries.push_back(e);
    }
  }
  return rep;
}

// -------------------------------------------------------------------- rmse

CsvTable RmseReport::table() const {
  CsvTable t{"mc-rmse",
             {"snr_db", "algorithm", "rmse_deg", "trials", "failures", "floor_deg", "seed",
              "trial_range"},
             {}};
  for (const auto& e : entries)
    t.rows.push_back({format_number(e.snr_db), std::string(to_string(e.algorithm)),
                      format_number(e.rmse_deg), std::to_string(e.trials),
                      std::to_string(e.failures), format_number(floor_deg), std::to_string(seed),
                      trial_range(e.trials)});
  return t;
}

CsvTable RmseReport::trial_table() const {
  CsvTable t{"mc-rmse trials", {"snr_db", "algorithm", "seed", "trial"}, {}};
  std::size_t k_max = 0;
  for (const auto& e : estimates) k_max = std::max(k_max, e.theta_deg.size());
  for (std::size_t k = 0; k < k_max; ++k) t.header.push_back("theta_hat" + std::to_string(k + 1));
  for (const auto& e : estimates) {
    std::vector<std::string> row{format_number(e.snr_db), std::string(to_string(e.algorithm)),
                                 std::to_string(seed), std::to_string(e.trial)};
    for (std::size_t k = 0; k < k_max; ++k)
      row.push_back(k < e.theta_deg.size() ? format_number(e.theta_deg[k]) : "");
    t.rows.push_back(std::move(row));
  }
  return t;
}

const RmseEntry* RmseReport::find(AlgorithmId id, double snr_db) const {
  for (const auto& e : entries)
    if (e.algorithm == id && std::abs(e.snr_db - snr_db) < 1e-9) return &e;
  return nullptr;
}

RmseReport cmd_mc_rmse(const ExperimentSpec& spec, const RunOptions& opts) {
  const Scene& base = spec.base.scene;
  const int k = static_cast<int>(base.targets.size());
  const auto cfg = serial(spec.base.pipeline, k);
  const Pipeline p(base.geometry, base.pulse, cfg);

  RmseReport rep;
  rep.truth_deg = sorted_truth(base);
  rep.floor_deg = quantization_floor(cfg.grid_step_deg);
  rep.seed = base.seed;

  const std::size_t n_alg = spec.algorithms.size();
  const std::size_t n_trials = static_cast<std::size_t>(spec.trials);
  const std::size_t jobs = spec.snr_db.size() * n_trials;
  std::vector<std::vector<std::vector<double>>> results(jobs, std::vector<std::vector<double>>(n_alg));
  // The same trial index draws the same unit noise at every SNR point.
  parallel_for(jobs, opts.threads, [&](std::size_t job) {
    const Scene sc = scene_at(spec, spec.snr_db[job / n_trials]);
    const auto out = p.run_many(spec.algorithms, synthesize_received(sc, job % n_trials));
    for (std::size_t a = 0; a < n_alg; ++a) results[job][a] = out.at(spec.algorithms[a]).estimate.theta_deg;
  });

  for (std::size_t s = 0; s < spec.snr_db.size(); ++s) {
    for (std::size_t a = 0; a < n_alg; ++a) {
      RmseEntry e;
      e.snr_db = spec.snr_db[s];
      e.algorithm = spec.algorithms[a];
      std::vector<std::vector<double>> truth, est;
      for (std::size_t t = 0; t < n_trials; ++t) {
        const auto& th = results[s * n_trials + t][a];
        rep.estimates.push_back({e.snr_db, e.algorithm, t, th});
        if (static_cast<int>(th.size()) != k) {
          ++e.failures;
          continue;
        }
        truth.push_back(rep.truth_deg);
        est.push_back(th);
      }
      e.trials = spec.trials;
      e.rmse_deg = est.empty() ? std::numeric_limits<double>::quiet_NaN() : rmse(truth, est);
      rep.entries.push_back(e);
    }
  }
  return rep;
}

}  // namespace hsdoa
