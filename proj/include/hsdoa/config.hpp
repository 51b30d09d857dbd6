#pragma once

// TOML scene, pipeline and experiment descriptions.
//
// A scene file holds [geometry], [pulse], one [[target]] table per source and
// [noise]. Pipeline knobs live in [ptft], [solver], [histogram] and
// [estimator]; experiment files add an [experiment] table. Every section is
// optional and falls back to the defaults of the corresponding struct.

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "hsdoa/pipeline.hpp"
#include "hsdoa/signal_model.hpp"

namespace hsdoa {

struct RunConfig {
  Scene scene;
  PipelineConfig pipeline;
  std::optional<double> snr_db;  ///< set when [noise] gives snr_db instead of a power
};

enum class ExperimentKind { kSnrGain, kSpectra, kEstimate, kResolutionSweep, kMcRmse };

std::string_view to_string(ExperimentKind kind);
ExperimentKind parse_experiment_kind(std::string_view name);

struct ExperimentSpec {
  ExperimentKind kind = ExperimentKind::kMcRmse;
  RunConfig base;
  int trials = 100;                       ///< I
  std::vector<double> snr_db;             ///< input-SNR axis
  std::vector<double> theta2_deg;         ///< resolution-sweep axis
  std::vector<double> sigma_hz;           ///< snr-gain axis
  std::vector<AlgorithmId> algorithms;    ///< defaults to all six
  std::string output;                     ///< empty writes to stdout

  void validate() const;
};

/// Noise power of the scene at `snr_db`, referenced to the first target's |b|.
double scene_noise_power(const Scene& scene, double snr_db);

RunConfig parse_run_config(std::string_view toml_text);
RunConfig load_run_config(const std::string& path);

ExperimentSpec parse_experiment(std::string_view toml_text);
ExperimentSpec load_experiment(const std::string& path);

}  // namespace hsdoa
