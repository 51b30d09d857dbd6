#include "hsdoa/pipeline.hpp"

#include <algorithm>
#include <cmath>

#include "hsdoa/errors.hpp"
#include "hsdoa/parallel.hpp"

namespace hsdoa {

std::string_view to_string(AlgorithmId id) {
  switch (id) {
    case AlgorithmId::kFftFdcbf: return "fft-fdcbf";
    case AlgorithmId::kFftFdmusic: return "fft-fdmusic";
    case AlgorithmId::kFftCfd: return "fft-cfd";
    case AlgorithmId::kPtftFdcbf: return "ptft-fdcbf";
    case AlgorithmId::kPtftFdmusic: return "ptft-fdmusic";
    case AlgorithmId::kPtftHscfd: return "ptft-hscfd";
  }
  return "unknown";
}

AlgorithmId parse_algorithm(std::string_view name) {
  for (const auto id : kAllAlgorithms)
    if (to_string(id) == name) return id;
  throw ParameterError("unknown algorithm '" + std::string(name) + "'");
}

bool uses_ptft(AlgorithmId id) {
  return id == AlgorithmId::kPtftFdcbf || id == AlgorithmId::kPtftFdmusic ||
         id == AlgorithmId::kPtftHscfd;
}

void PipelineConfig::validate() const {
  ptft.validate();
  if (!(solver.mu > 0.0)) throw ParameterError("solver mu must be positive");
  if (!(zeta_deg > 0.0 && zeta_deg <= 180.0)) throw ParameterError("zeta must be in (0, 180]");
  if (targets < 1) throw ParameterError("number of targets K must be at least 1");
  if (!(grid_step_deg > 0.0)) throw ParameterError("grid step must be positive");
}

Pipeline::Pipeline(ArrayGeometry geometry, LfmPulse pulse, PipelineConfig config)
    : geometry_(geometry), pulse_(pulse), config_(std::move(config)) {
  geometry_.validate();
  pulse_.validate();
  config_.validate();
  pairs_ = window_count(pulse_, config_.ptft);
  sensing_ = sensing_matrix(geometry_, config_.ptft.delta_f_hz,
                            angle_grid(-90.0, 90.0, config_.grid_step_deg));
  lipschitz_ = lipschitz_estimate(sensing_.columns);
  screening_ = screen_amplitude_error(geometry_, pulse_, config_.ptft);
}

std::vector<FdSnapshot> Pipeline::fft_snapshots(const SpectrumMatrix& spec) const {
  if (spec.sensors() != geometry_.sensors) throw ParameterError("spectrum sensor count mismatch");
  auto bin_of = [&](double f) {
    const double k = f / spec.df_hz;
    const double r = std::round(k);
    if (std::abs(k - r) > 1e-6 || r < 0 || r >= static_cast<double>(spec.bin_count()))
      throw ParameterError("FFT snapshot frequency " + std::to_string(f) +
                           " Hz is not an exact DFT bin");
    return static_cast<Eigen::Index>(r);
  };
  std::vector<FdSnapshot> out;
  out.reserve(static_cast<std::size_t>(pairs_));
  for (int w = 1; w <= pairs_; ++w) {
    const double f_lo = window_center(pulse_, config_.ptft, w);
    const double f_hi = f_lo + config_.ptft.delta_f_hz;
    out.push_back(fd_snapshot(spec.bins.col(bin_of(f_lo)), spec.bins.col(bin_of(f_hi)), f_lo, f_hi));
  }
  return out;
}

std::vector<FdSnapshot> Pipeline::ptft_snapshots(const SpectrumMatrix& spec, RidgeTime* ridge) const {
  if (spec.sensors() != geometry_.sensors) throw ParameterError("spectrum sensor count mismatch");
  const auto set = extract_snapshots(spec, pulse_, config_.ptft);
  if (ridge != nullptr) *ridge = set.ridge;
  std::vector<FdSnapshot> out;
  out.reserve(set.centers_hz.size());
  for (std::size_t w = 0; w < set.centers_hz.size(); ++w) {
    const auto c = static_cast<Eigen::Index>(w);
    out.push_back(fd_snapshot(set.snapshots.col(c), set.shifted.col(c), set.centers_hz[w],
                              set.centers_hz[w] + set.delta_f_hz));
  }
  return out;
}

std::vector<DoaSpectrum> Pipeline::cfd_spectra(const std::vector<FdSnapshot>& snapshots) const {
  std::vector<DoaSpectrum> out(snapshots.size());
  parallel_for(snapshots.size(), config_.threads, [&](std::size_t w) {
    out[w] = cfd_spectrum(snapshots[w], sensing_, config_.solver, lipschitz_);
    out[w].w = static_cast<int>(w) + 1;
  });
  return out;
}

namespace {

EstimationResult from_peaks(const std::vector<Peak>& peaks, int k) {
  EstimationResult r;
  for (const auto& p : peaks) r.theta_deg.push_back(p.theta_deg);
  std::sort(r.theta_deg.begin(), r.theta_deg.end());
  if (static_cast<int>(peaks.size()) < k)
    r.warning = "spectrum has only " + std::to_string(peaks.size()) + " peaks";
  return r;
}

}  // namespace

RunResult Pipeline::estimate(AlgorithmId id, const std::vector<FdSnapshot>& snapshots) const {
  if (snapshots.empty()) throw ParameterError("no frequency-difference snapshots");
  RunResult res;
  res.algorithm = id;
  auto& diag = res.diagnostics;
  if (screening_) diag.warnings.push_back(*screening_);
  const int k = config_.targets;
  const auto& grid = sensing_.grid_deg;
  const bool keep = config_.keep_diagnostics;

  switch (id) {
    case AlgorithmId::kFftFdcbf:
    case AlgorithmId::kPtftFdcbf: {
      std::vector<DoaSpectrum> per_w(snapshots.size());
      for (std::size_t w = 0; w < snapshots.size(); ++w) {
        per_w[w] = cbf_spectrum(snapshots[w], sensing_);
        per_w[w].w = static_cast<int>(w) + 1;
      }
      auto avg = incoherent_average(per_w);
      avg.estimator = std::string(to_string(id));
      res.estimate = from_peaks(extract_peaks(avg, grid, static_cast<std::size_t>(k)), k);
      if (keep) {
        diag.per_w = std::move(per_w);
        diag.combined = std::move(avg);
      }
      break;
    }
    case AlgorithmId::kFftFdmusic:
    case AlgorithmId::kPtftFdmusic: {
      const int dim = config_.music_dim > 0 ? config_.music_dim : k;
      auto spec = music_spectrum(snapshots, sensing_, dim);
      spec.estimator = std::string(to_string(id));
      res.estimate = from_peaks(extract_peaks(spec, grid, static_cast<std::size_t>(k)), k);
      if (keep) diag.combined = std::move(spec);
      break;
    }
    case AlgorithmId::kFftCfd: {
      auto per_w = cfd_spectra(snapshots);
      auto avg = incoherent_average(per_w);
      avg.estimator = std::string(to_string(id));
      res.estimate = from_peaks(extract_peaks(avg, grid, static_cast<std::size_t>(k)), k);
      if (keep) {
        diag.per_w = std::move(per_w);
        diag.combined = std::move(avg);
      }
      break;
    }
    case AlgorithmId::kPtftHscfd: {
      auto per_w = cfd_spectra(snapshots);
      const auto count = static_cast<std::size_t>(k * k);
      for (const auto& s : per_w) diag.peaks.per_w.push_back({s.w, extract_peaks(s, grid, count)});
      if (diag.peaks.flattened().empty()) {
        res.estimate.warning = "no spectral peaks in any frequency pair";
      } else {
        res.estimate = estimate_doas(diag.peaks, config_.zeta_deg, k);
      }
      if (keep) {
        for (auto& s : per_w) s.estimator = "ptft-cfd";
        diag.per_w = std::move(per_w);
      } else {
        diag.peaks.per_w.clear();
      }
      break;
    }
  }
  if (keep) diag.snapshots = snapshots;
  return res;
}

RunResult Pipeline::run(AlgorithmId id, const SampledWaveforms& waveforms) const {
  const std::array<AlgorithmId, 1> one{id};
  return std::move(run_many(one, waveforms).at(id));
}

std::map<AlgorithmId, RunResult> Pipeline::run_many(std::span<const AlgorithmId> ids,
                                                    const SampledWaveforms& waveforms) const {
  const auto spec = spectra(waveforms);
  std::optional<std::vector<FdSnapshot>> fft, ptft;
  RidgeTime ridge;
  std::map<AlgorithmId, RunResult> out;
  for (const auto id : ids) {
    auto& snaps = uses_ptft(id) ? ptft : fft;
    if (!snaps) snaps = uses_ptft(id) ? ptft_snapshots(spec, &ridge) : fft_snapshots(spec);
    auto res = estimate(id, *snaps);
    if (uses_ptft(id)) res.diagnostics.ridge = ridge;
    out.emplace(id, std::move(res));
  }
  return out;
}

}  // namespace hsdoa
