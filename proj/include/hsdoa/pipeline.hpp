#pragma once

// End-to-end DOA algorithms: FFT- or PTFT-derived frequency-difference
// snapshots followed by FD-CBF, FD-MUSIC, CFD with incoherent averaging, or
// CFD with coarse-to-fine histogram statistics (ptft-hscfd).

#include <array>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "hsdoa/estimators.hpp"
#include "hsdoa/fd.hpp"
#include "hsdoa/histogram.hpp"
#include "hsdoa/ptft.hpp"
#include "hsdoa/signal_model.hpp"

namespace hsdoa {

enum class AlgorithmId { kFftFdcbf, kFftFdmusic, kFftCfd, kPtftFdcbf, kPtftFdmusic, kPtftHscfd };

inline constexpr std::array<AlgorithmId, 6> kAllAlgorithms = {
    AlgorithmId::kFftFdcbf,  AlgorithmId::kFftFdmusic,  AlgorithmId::kFftCfd,
    AlgorithmId::kPtftFdcbf, AlgorithmId::kPtftFdmusic, AlgorithmId::kPtftHscfd};

std::string_view to_string(AlgorithmId id);
AlgorithmId parse_algorithm(std::string_view name);
bool uses_ptft(AlgorithmId id);

enum class SnapshotSource { kFft, kPtft };

struct PipelineConfig {
  PtftConfig ptft;
  /// Peaks are read from the accelerated iterates; the exact-optimality
  /// polish is left to standalone solves.
  L1Options solver{.polish = false};
  double zeta_deg = 2.0;
  int targets = 2;      ///< K
  int music_dim = 0;    ///< 0 selects K
  double grid_step_deg = 0.1;
  bool keep_diagnostics = false;
  int threads = 1;      ///< workers for the per-pair fan-out

  void validate() const;
};

struct Diagnostics {
  std::vector<FdSnapshot> snapshots;
  std::vector<DoaSpectrum> per_w;       ///< per-pair spectra (cbf / cfd paths)
  std::optional<DoaSpectrum> combined;  ///< averaged or MUSIC spectrum
  PeakCollection peaks;                 ///< K^2 peaks per pair (hscfd)
  std::optional<RidgeTime> ridge;
  std::vector<std::string> warnings;
};

struct RunResult {
  AlgorithmId algorithm = AlgorithmId::kPtftHscfd;
  EstimationResult estimate;
  Diagnostics diagnostics;
};

/// Immutable per-geometry state (sensing matrix, step size) shared by runs.
class Pipeline {
 public:
  Pipeline(ArrayGeometry geometry, LfmPulse pulse, PipelineConfig config);

  const PipelineConfig& config() const { return config_; }
  const SensingMatrix& sensing() const { return sensing_; }
  const std::vector<double>& grid() const { return sensing_.grid_deg; }
  double lipschitz() const { return lipschitz_; }
  int pair_count() const { return pairs_; }
  const std::optional<std::string>& screening_warning() const { return screening_; }

  /// Bin-exact DFT snapshots at f_w and f_w + delta_f.
  std::vector<FdSnapshot> fft_snapshots(const SpectrumMatrix& spec) const;
  /// Ridge-sampled PTFT snapshots; the ridge is reported through `ridge`.
  std::vector<FdSnapshot> ptft_snapshots(const SpectrumMatrix& spec,
                                         RidgeTime* ridge = nullptr) const;

  /// Estimation stage on precomputed FD snapshots.
  RunResult estimate(AlgorithmId id, const std::vector<FdSnapshot>& snapshots) const;

  RunResult run(AlgorithmId id, const SampledWaveforms& waveforms) const;

  /// Runs several algorithms on one record, sharing the DFT and PTFT front ends.
  std::map<AlgorithmId, RunResult> run_many(std::span<const AlgorithmId> ids,
                                            const SampledWaveforms& waveforms) const;

  /// Per-pair CFD spectra (used by hscfd and the fft-cfd baseline).
  std::vector<DoaSpectrum> cfd_spectra(const std::vector<FdSnapshot>& snapshots) const;

 private:
  ArrayGeometry geometry_;
  LfmPulse pulse_;
  PipelineConfig config_;
  SensingMatrix sensing_;
  double lipschitz_ = 0.0;
  int pairs_ = 0;
  std::optional<std::string> screening_;
};

}  // namespace hsdoa
