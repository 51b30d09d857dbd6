#include "hsdoa/config.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "toml.hpp"

#include "hsdoa/errors.hpp"

namespace hsdoa {
namespace {

double number(const toml::table& t, std::string_view key, double fallback) {
  const auto node = t[key];
  if (!node) return fallback;
  if (const auto v = node.value<double>()) return *v;
  throw ParameterError("'" + std::string(key) + "' must be a number");
}

std::int64_t integer(const toml::table& t, std::string_view key, std::int64_t fallback) {
  const auto node = t[key];
  if (!node) return fallback;
  if (const auto v = node.value<std::int64_t>()) return *v;
  throw ParameterError("'" + std::string(key) + "' must be an integer");
}

bool boolean(const toml::table& t, std::string_view key, bool fallback) {
  const auto node = t[key];
  if (!node) return fallback;
  if (const auto v = node.value<bool>()) return *v;
  throw ParameterError("'" + std::string(key) + "' must be a boolean");
}

std::vector<double> number_list(const toml::table& t, std::string_view key) {
  std::vector<double> out;
  const auto node = t[key];
  if (!node) return out;
  if (const auto v = node.value<double>()) return {*v};
  const auto* arr = node.as_array();
  if (arr == nullptr) throw ParameterError("'" + std::string(key) + "' must be a number or array");
  for (const auto& item : *arr) {
    const auto v = item.value<double>();
    if (!v) throw ParameterError("'" + std::string(key) + "' must hold numbers");
    out.push_back(*v);
  }
  return out;
}

// Ranges written as {start, stop, step} tables expand inclusively.
std::vector<double> axis(const toml::table& t, std::string_view key) {
  const auto node = t[key];
  if (const auto* range = node.as_table()) {
    const double start = number(*range, "start", NAN);
    const double stop = number(*range, "stop", NAN);
    const double step = number(*range, "step", NAN);
    if (!(step > 0.0) || !(stop >= start))
      throw ParameterError("'" + std::string(key) + "' range needs start <= stop and step > 0");
    std::vector<double> out;
    const auto n = static_cast<long>(std::floor((stop - start) / step + 1e-9));
    for (long i = 0; i <= n; ++i) out.push_back(start + static_cast<double>(i) * step);
    return out;
  }
  if (const auto* arr = node.as_array()) {
    std::vector<double> out;
    for (const auto& item : *arr) {
      if (const auto* sub = item.as_table()) {
        toml::table wrap;
        wrap.insert("r", *sub);
        const auto part = axis(wrap, "r");
        out.insert(out.end(), part.begin(), part.end());
      } else if (const auto v = item.value<double>()) {
        out.push_back(*v);
      } else {
        throw ParameterError("'" + std::string(key) + "' must hold numbers or ranges");
      }
    }
    return out;
  }
  return number_list(t, key);
}

const toml::table* section(const toml::table& root, std::string_view name) {
  const auto node = root[name];
  if (!node) return nullptr;
  if (const auto* t = node.as_table()) return t;
  throw ParameterError("[" + std::string(name) + "] must be a table");
}

toml::table parse_text(std::string_view text) {
  try {
    return toml::parse(text);
  } catch (const toml::parse_error& e) {
    std::ostringstream msg;
    msg << "TOML parse error: " << e.description() << " at line " << e.source().begin.line;
    throw ParameterError(msg.str());
  }
}

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParameterError("cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

RunConfig run_config(const toml::table& root) {
  RunConfig rc;
  auto& sc = rc.scene;
  if (const auto* g = section(root, "geometry")) {
    sc.geometry.sensors = static_cast<int>(integer(*g, "m", sc.geometry.sensors));
    sc.geometry.spacing_m = number(*g, "d_m", sc.geometry.spacing_m);
    sc.geometry.speed_mps = number(*g, "c_mps", sc.geometry.speed_mps);
  }
  if (const auto* p = section(root, "pulse")) {
    sc.pulse.f_low_hz = number(*p, "f_l_hz", sc.pulse.f_low_hz);
    sc.pulse.f_high_hz = number(*p, "f_h_hz", sc.pulse.f_high_hz);
    sc.pulse.duration_s = number(*p, "t_s", sc.pulse.duration_s);
    sc.pulse.record_s = number(*p, "t_all_s", sc.pulse.record_s);
    sc.pulse.fs_hz = number(*p, "fs_hz", sc.pulse.fs_hz);
  }
  if (const auto node = root["target"]) {
    const auto* arr = node.as_array();
    if (arr == nullptr) throw ParameterError("targets must be given as [[target]] tables");
    for (const auto& item : *arr) {
      const auto* t = item.as_table();
      if (t == nullptr) throw ParameterError("each [[target]] must be a table");
      Target tg;
      tg.theta_deg = number(*t, "theta_deg", NAN);
      if (std::isnan(tg.theta_deg)) throw ParameterError("[[target]] needs theta_deg");
      tg.amplitude = {number(*t, "b_re", 1.0), number(*t, "b_im", 0.0)};
      tg.delay_s = number(*t, "tau_s", 0.0);
      sc.targets.push_back(tg);
    }
  }
  if (const auto* n = section(root, "noise")) {
    sc.seed = static_cast<std::uint64_t>(integer(*n, "seed", 0));
    if ((*n)["snr_db"] && (*n)["power"])
      throw ParameterError("[noise] takes either snr_db or power, not both");
    if ((*n)["snr_db"]) rc.snr_db = number(*n, "snr_db", 0.0);
    sc.noise_power = number(*n, "power", 0.0);
    if (sc.noise_power < 0.0) throw ParameterError("noise power must be non-negative");
  }

  auto& pc = rc.pipeline;
  if (const auto* p = section(root, "ptft")) {
    pc.ptft.sigma_hz = number(*p, "sigma_hz", pc.ptft.sigma_hz);
    pc.ptft.f_step_hz = number(*p, "f_step_hz", pc.ptft.f_step_hz);
    pc.ptft.delta_f_hz = number(*p, "delta_f_hz", pc.ptft.delta_f_hz);
    pc.ptft.kernel_const_s = number(*p, "kernel_const_s", pc.ptft.kernel_const_s);
  }
  if (const auto* s = section(root, "solver")) {
    pc.solver.mu = number(*s, "mu", pc.solver.mu);
    pc.solver.tol = number(*s, "tol", pc.solver.tol);
    pc.solver.max_iter = static_cast<int>(integer(*s, "max_iter", pc.solver.max_iter));
    pc.solver.polish = boolean(*s, "polish", pc.solver.polish);
  }
  if (const auto* h = section(root, "histogram")) pc.zeta_deg = number(*h, "zeta_deg", pc.zeta_deg);
  if (const auto* e = section(root, "estimator")) {
    pc.grid_step_deg = number(*e, "grid_step_deg", pc.grid_step_deg);
    pc.music_dim = static_cast<int>(integer(*e, "music_dim", pc.music_dim));
  }
  if (!sc.targets.empty()) pc.targets = static_cast<int>(sc.targets.size());
  if (const auto* e = section(root, "estimator"))
    pc.targets = static_cast<int>(integer(*e, "targets", pc.targets));

  if (rc.snr_db && !sc.targets.empty()) sc.noise_power = scene_noise_power(sc, *rc.snr_db);
  return rc;
}

}  // namespace

std::string_view to_string(ExperimentKind kind) {
  switch (kind) {
    case ExperimentKind::kSnrGain: return "snr-gain";
    case ExperimentKind::kSpectra: return "spectra";
    case ExperimentKind::kEstimate: return "estimate";
    case ExperimentKind::kResolutionSweep: return "resolution-sweep";
    case ExperimentKind::kMcRmse: return "mc-rmse";
  }
  return "unknown";
}

ExperimentKind parse_experiment_kind(std::string_view name) {
  for (const auto k : {ExperimentKind::kSnrGain, ExperimentKind::kSpectra, ExperimentKind::kEstimate,
                       ExperimentKind::kResolutionSweep, ExperimentKind::kMcRmse})
    if (to_string(k) == name) return k;
  throw ParameterError("unknown experiment kind '" + std::string(name) + "'");
}

double scene_noise_power(const Scene& scene, double snr_db) {
  if (scene.targets.empty()) throw ParameterError("SNR needs at least one target amplitude");
  const double mag = std::abs(scene.targets.front().amplitude);
  if (!(mag > 0.0)) throw ParameterError("SNR reference amplitude must be nonzero");
  return noise_power_for_snr(snr_db, mag);
}

RunConfig parse_run_config(std::string_view toml_text) {
  auto rc = run_config(parse_text(toml_text));
  rc.scene.validate();
  rc.pipeline.validate();
  return rc;
}

RunConfig load_run_config(const std::string& path) { return parse_run_config(read_file(path)); }

void ExperimentSpec::validate() const {
  if (trials < 1) throw ParameterError("experiment needs at least one trial");
  base.pipeline.validate();
  switch (kind) {
    case ExperimentKind::kSnrGain:
      if (snr_db.empty() || sigma_hz.empty())
        throw ParameterError("snr-gain needs nonempty snr_db and sigma_hz axes");
      break;
    case ExperimentKind::kResolutionSweep:
      if (theta2_deg.empty()) throw ParameterError("resolution-sweep needs a nonempty theta2_deg axis");
      if (base.scene.targets.empty()) throw ParameterError("resolution-sweep needs the first target");
      break;
    case ExperimentKind::kMcRmse:
      if (snr_db.empty()) throw ParameterError("mc-rmse needs a nonempty snr_db axis");
      break;
    default:
      break;
  }
  if (kind != ExperimentKind::kResolutionSweep && kind != ExperimentKind::kSnrGain &&
      base.scene.targets.empty())
    throw ParameterError("experiment needs at least one [[target]]");
}

ExperimentSpec parse_experiment(std::string_view toml_text) {
  const auto root = parse_text(toml_text);
  ExperimentSpec spec;
  spec.base = run_config(root);
  const auto* e = section(root, "experiment");
  if (e == nullptr) throw ParameterError("missing [experiment] table");
  const auto kind = (*e)["kind"].value<std::string>();
  if (!kind) throw ParameterError("[experiment] needs kind");
  spec.kind = parse_experiment_kind(*kind);
  spec.trials = static_cast<int>(integer(*e, "trials", spec.trials));
  spec.snr_db = axis(*e, "snr_db");
  spec.theta2_deg = axis(*e, "theta2_deg");
  spec.sigma_hz = axis(*e, "sigma_hz");
  if (const auto node = (*e)["algorithms"]) {
    const auto* arr = node.as_array();
    if (arr == nullptr) throw ParameterError("algorithms must be an array of names");
    for (const auto& item : *arr) {
      const auto name = item.value<std::string>();
      if (!name) throw ParameterError("algorithms must be an array of names");
      spec.algorithms.push_back(parse_algorithm(*name));
    }
  }
  if (spec.algorithms.empty()) spec.algorithms.assign(kAllAlgorithms.begin(), kAllAlgorithms.end());
  spec.output = (*e)["output"].value_or(std::string{});
  if (spec.snr_db.empty() && spec.base.snr_db) spec.snr_db = {*spec.base.snr_db};
  spec.validate();
  return spec;
}

ExperimentSpec load_experiment(const std::string& path) { return parse_experiment(read_file(path)); }

}  // namespace hsdoa
