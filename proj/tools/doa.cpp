// doa: scene synthesis, single-shot estimation and the Monte Carlo experiments.

#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"

#include "hsdoa/config.hpp"
#include "hsdoa/errors.hpp"
#include "hsdoa/experiments.hpp"
#include "hsdoa/waveform_io.hpp"

namespace {

enum ExitCode { kOk = 0, kConfigError = 2, kNumericError = 3, kInternalError = 4 };

void emit(const std::string& text, const std::string& path) {
  if (path.empty() || path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream out(path);
  if (!out) throw hsdoa::ParameterError("cannot open '" + path + "' for writing");
  out << text;
}

hsdoa::ExperimentSpec load_spec(const std::string& path, hsdoa::ExperimentKind expected) {
  auto spec = hsdoa::load_experiment(path);
  if (spec.kind != expected)
    throw hsdoa::ParameterError("spec kind is '" + std::string(to_string(spec.kind)) + "', expected '" +
                                std::string(to_string(expected)) + "'");
  return spec;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Broadband DOA estimation for sparse uniform linear arrays"};
  app.require_subcommand(1);
  hsdoa::RunOptions opts;
  app.add_option("--threads", opts.threads, "worker threads")->check(CLI::PositiveNumber);
  app.add_flag("--deterministic", opts.deterministic, "omit the timestamp header from tables");

  std::string scene_path, spec_path, out_path, wave_path, algo = "ptft-hscfd";
  std::optional<std::uint64_t> seed;
  std::uint64_t trial = 0;
  std::optional<int> trials;
  bool per_trial = false;

  auto* synth = app.add_subcommand("synth", "write the received array waveforms of a scene");
  synth->add_option("--scene", scene_path, "scene TOML")->required()->check(CLI::ExistingFile);
  synth->add_option("--out", out_path, "output file (raw little-endian layout)")->required();
  synth->add_option("--seed", seed, "override the noise seed");
  synth->add_option("--trial", trial, "trial index");

  auto* estimate = app.add_subcommand("estimate", "estimate DOAs for one realization");
  estimate->add_option("--scene", scene_path, "scene TOML")->required()->check(CLI::ExistingFile);
  estimate->add_option("--algo", algo, "fft-fdcbf|fft-fdmusic|fft-cfd|ptft-fdcbf|ptft-fdmusic|ptft-hscfd");
  estimate->add_option("--seed", seed, "override the noise seed");
  estimate->add_option("--trial", trial, "trial index");
  estimate->add_option("--input", wave_path, "estimate from a synth file instead of the scene")
      ->check(CLI::ExistingFile);
  estimate->add_option("--out", out_path, "JSON output path (default stdout)");

  auto add_spec = [&](const char* name, const char* help) {
    auto* sub = app.add_subcommand(name, help);
    sub->add_option("--spec", spec_path, "experiment TOML")->required()->check(CLI::ExistingFile);
    sub->add_option("--out", out_path, "CSV output path (default from spec, else stdout)");
    sub->add_option("--trials", trials, "override the trial count")->check(CLI::PositiveNumber);
    return sub;
  };
  auto* mc = add_spec("mc-rmse", "RMSE versus input SNR");
  mc->add_flag("--per-trial", per_trial, "write per-trial estimates instead of the summary");
  auto* gain = add_spec("snr-gain", "output SNR of FFT and PTFT versus input SNR");
  auto* res = add_spec("resolution", "median estimates over a theta2 sweep");
  auto* spectra = add_spec("spectra", "per-pair DOA spectra of fft-cfd and ptft-cfd");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kOk : kConfigError;
  }

  try {
    if (synth->parsed() || estimate->parsed()) {
      auto rc = hsdoa::load_run_config(scene_path);
      if (seed) rc.scene.seed = *seed;
      if (synth->parsed()) {
        hsdoa::save_waveforms(out_path, hsdoa::synthesize_received(rc.scene, trial));
        return kOk;
      }
      const auto id = hsdoa::parse_algorithm(algo);
      rc.pipeline.threads = opts.threads;
      if (wave_path.empty()) {
        emit(hsdoa::estimate_json(rc, id, trial) + "\n", out_path);
      } else {
        const hsdoa::Pipeline p(rc.scene.geometry, rc.scene.pulse, rc.pipeline);
        const auto r = p.run(id, hsdoa::load_waveforms(wave_path));
        emit(hsdoa::to_json(r.estimate) + "\n", out_path);
      }
      return kOk;
    }

    using K = hsdoa::ExperimentKind;
    auto run = [&](K kind, auto&& body) {
      auto spec = load_spec(spec_path, kind);
      if (trials) spec.trials = *trials;
      const std::string dest = out_path.empty() ? spec.output : out_path;
      emit(body(spec).str(opts.deterministic), dest);
    };
    if (mc->parsed())
      run(K::kMcRmse, [&](const auto& s) {
        const auto r = hsdoa::cmd_mc_rmse(s, opts);
        return per_trial ? r.trial_table() : r.table();
      });
    if (gain->parsed()) run(K::kSnrGain, [&](const auto& s) { return hsdoa::cmd_snr_gain(s, opts).table(); });
    if (res->parsed())
      run(K::kResolutionSweep, [&](const auto& s) { return hsdoa::cmd_resolution_sweep(s, opts).table(); });
    if (spectra->parsed()) run(K::kSpectra, [&](const auto& s) { return hsdoa::cmd_spectra(s, opts).table(); });
    return kOk;
  } catch (const hsdoa::ParameterError& e) {
    std::cerr << "doa: config error: " << e.what() << '\n';
    return kConfigError;
  } catch (const hsdoa::NumericError& e) {
    std::cerr << "doa: numeric error: " << e.what() << '\n';
    return kNumericError;
  } catch (const std::exception& e) {
    std::cerr << "doa: " << e.what() << '\n';
    return kInternalError;
  }
}
