#pragma once

// Monte Carlo harness: output-SNR curves, per-pair spectra, resolution sweeps
// and RMSE-versus-SNR tables. Every trial is a pure function of
// (scene seed, trial index), so tables are reproducible for any thread count.

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "hsdoa/config.hpp"
#include "hsdoa/pipeline.hpp"

namespace hsdoa {

struct RunOptions {
  int threads = 1;
  bool deterministic = false;  ///< drop the timestamp header line
};

/// sqrt(1/(I K) sum (theta - theta_hat)^2), rows matched after ascending sort.
double rmse(const std::vector<std::vector<double>>& truth,
            const std::vector<std::vector<double>>& estimates);

/// RMSE floor of a perfect estimator snapped to a uniform grid: step / (2 sqrt 3).
double quantization_floor(double grid_step_deg);

/// Column-named text table rendered as CSV.
struct CsvTable {
  std::string title;
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  std::string str(bool deterministic) const;
};

std::string format_number(double v);

struct SnrGainRow {
  double input_snr_db = 0.0;
  double sigma_hz = 0.0;
  int sensor = 0;  ///< 1-based
  double fft_db = 0.0;
  double ptft_db = 0.0;
};

struct SnrGainReport {
  std::vector<SnrGainRow> rows;
  std::uint64_t seed = 0;
  int trials = 0;

  CsvTable table() const;
  /// Mean over sensors and input SNRs of ptft_db - fft_db at one sigma.
  double mean_gain_db(double sigma_hz) const;
};

SnrGainReport cmd_snr_gain(const ExperimentSpec& spec, const RunOptions& opts = {});

struct SpectraReport {
  std::vector<DoaSpectrum> fft;   ///< per-pair fft-cfd spectra
  std::vector<DoaSpectrum> ptft;  ///< per-pair ptft-cfd spectra
  DoaSpectrum fft_average;
  DoaSpectrum ptft_average;
  std::vector<double> grid_deg;
  EstimationResult hscfd;
  std::uint64_t seed = 0;
  std::uint64_t trial = 0;

  CsvTable table() const;
};

SpectraReport cmd_spectra(const ExperimentSpec& spec, const RunOptions& opts = {});

/// One-record estimate as JSON (algorithm, truth, seed, estimate fields).
std::string estimate_json(const RunConfig& rc, AlgorithmId id, std::uint64_t trial);

struct ResolutionEntry {
  double theta2_deg = 0.0;
  AlgorithmId algorithm = AlgorithmId::kPtftHscfd;
  double theta_hat1 = 0.0;  ///< median over trials
  double theta_hat2 = 0.0;
  int failures = 0;         ///< trials with fewer than two estimates
  bool resolved = false;    ///< both medians within 1 degree of the truth
};

struct ResolutionReport {
  double theta1_deg = 0.0;
  std::vector<ResolutionEntry> entries;
  std::uint64_t seed = 0;
  int trials = 0;

  CsvTable table() const;
  /// Smallest theta2 - theta1 separation resolved by `id`, if any.
  std::optional<double> minimum_resolvable(AlgorithmId id) const;
  const ResolutionEntry* find(AlgorithmId id, double theta2_deg) const;
};

/// Median estimates per sweep point; theta1 is the spec's first target.
ResolutionReport cmd_resolution_sweep(const ExperimentSpec& spec, const RunOptions& opts = {});

struct RmseEntry {
  double snr_db = 0.0;
  AlgorithmId algorithm = AlgorithmId::kPtftHscfd;
  double rmse_deg = 0.0;  ///< NaN when every trial failed
  int trials = 0;
  int failures = 0;
};

struct TrialEstimate {
  double snr_db = 0.0;
  AlgorithmId algorithm = AlgorithmId::kPtftHscfd;
  std::uint64_t trial = 0;
  std::vector<double> theta_deg;
};

struct RmseReport {
  std::vector<RmseEntry> entries;
  std::vector<TrialEstimate> estimates;
  std::vector<double> truth_deg;
  double floor_deg = 0.0;
  std::uint64_t seed = 0;

  CsvTable table() const;
  CsvTable trial_table() const;
  const RmseEntry* find(AlgorithmId id, double snr_db) const;
};

RmseReport cmd_mc_rmse(const ExperimentSpec& spec, const RunOptions& opts = {});

}  // namespace hsdoa
