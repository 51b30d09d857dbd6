#pragma once

// Parameterized time-frequency transform with a chirp-matched kernel.
//
// For an LFM pulse the kernel kappa(f) = -T (f - fL) / B + C is the negated
// group-delay law, so the rotation operator Gamma_R(f) = exp(-j 2 pi int kappa)
// removes the quadratic spectral phase and every analysis window collapses the
// chirp into a sinc ridge at the arrival time. Windows are ideal rectangular
// masks over DFT bins.

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "hsdoa/signal_model.hpp"
#include "hsdoa/types.hpp"

namespace hsdoa {

struct PtftConfig {
  double sigma_hz = 32.0;       ///< analysis window width
  double f_step_hz = 100.0;     ///< window-center increment
  double delta_f_hz = 200.0;    ///< frequency difference between paired windows
  double kernel_const_s = 0.0;  ///< C
  bool gamma_s_unity = true;    ///< Gamma_S == 1, ridge lands at the arrival delay

  void validate() const;
};

/// Number W of frequency pairs (f_w, f_w + delta_f) inside the band.
int window_count(const LfmPulse& pulse, const PtftConfig& cfg);

/// Center of window w, 1-based: fL + (w - 1) * f_step.
double window_center(const LfmPulse& pulse, const PtftConfig& cfg, int w);

struct KernelPhase {
  double kappa_s = 0.0;
  double rotation_rad = 0.0;  ///< Gamma_R(f) = exp(j * rotation_rad)
};

KernelPhase kernel_phase(const LfmPulse& pulse, double kernel_const_s, double f_hz);

/// Half-open DFT-bin range [first, last) whose centers lie in [fc - sigma/2, fc + sigma/2).
struct BinRange {
  Eigen::Index first = 0;
  Eigen::Index last = 0;
  Eigen::Index size() const { return last - first; }
};

BinRange window_bins(double center_hz, double sigma_hz, double df_hz, Eigen::Index bin_count);

/// Full complex time series g(t, fc) of one sensor's spectrum row for a window
/// centered at `center_hz`. Scaled so a unit cosine chirp yields a ridge
/// magnitude of about sigma * sqrt(T/B).
CVector ptft_transform(const SpectrumMatrix& spec, int sensor, const LfmPulse& pulse,
                       const PtftConfig& cfg, double center_hz);

/// Convenience overload taking raw samples and a 1-based window index.
CVector ptft_transform(std::span<const double> record, const LfmPulse& pulse,
                       const PtftConfig& cfg, int w);

/// Single-sample evaluation of ptft_transform at time index `n`.
cplx ptft_sample(const SpectrumMatrix& spec, int sensor, const LfmPulse& pulse,
                 const PtftConfig& cfg, double center_hz, Eigen::Index n);

/// Transform of one sensor over all W windows.
struct TfMap {
  CMatrix values;  ///< N x W
  std::vector<double> centers_hz;
  double dt_s = 0.0;

  double time(Eigen::Index n) const { return static_cast<double>(n) * dt_s; }
};

TfMap ptft_map(const SpectrumMatrix& spec, int sensor, const LfmPulse& pulse, const PtftConfig& cfg);

struct RidgeTime {
  Eigen::Index index = 0;
  double time_s = 0.0;
};

/// argmax over t of sum_w |g(t, f_w)|^2; the earliest sample wins ties.
RidgeTime ridge_time(const TfMap& map);

/// Same ridge rule without materializing the N x W map.
RidgeTime ridge_time(const SpectrumMatrix& spec, int sensor, const LfmPulse& pulse,
                     const PtftConfig& cfg);

/// Array data sampled at a single ridge time for every window pair.
struct TfSnapshotSet {
  CMatrix snapshots;  ///< M x W, column w at f_w
  CMatrix shifted;    ///< M x W, column w at f_w + delta_f
  std::vector<double> centers_hz;
  double delta_f_hz = 0.0;
  RidgeTime ridge;
};

/// Transforms every sensor at the ridge time found on sensor 1.
TfSnapshotSet extract_snapshots(const SpectrumMatrix& spec, const LfmPulse& pulse,
                                const PtftConfig& cfg);

/// Predicted ridge amplitude and its deviation for one sensor/target.
struct RidgeAmplitudeModel {
  double rho = 0.0;         ///< |b| sigma sqrt(T/B) sinc(pi sigma eps)
  double epsilon_s = 0.0;
  double delta = 0.0;       ///< |b| sigma sqrt(T/B) (pi sigma tau_m)^2 / 6
  double relative_deviation = 0.0;  ///< (pi sigma tau_m)^2 / 6
};

/// Ridge amplitude of sensor `m` (0-based) when sampled at the sensor-1 ridge.
RidgeAmplitudeModel ridge_amplitude(const ArrayGeometry& geom, const LfmPulse& pulse,
                                    const PtftConfig& cfg, int m, double theta_deg,
                                    double amplitude);

/// Warning text when the worst-case relative amplitude deviation over all
/// sensors at |theta| = `theta_limit_deg` exceeds `tolerance`.
std::optional<std::string> screen_amplitude_error(const ArrayGeometry& geom, const LfmPulse& pulse,
                                                  const PtftConfig& cfg, double tolerance = 0.05,
                                                  double theta_limit_deg = 90.0);

struct SnrPair {
  double fft_db = 0.0;
  double ptft_db = 0.0;
};

/// Per-sensor output SNRs of a plain DFT bin and of the PTFT ridge sample,
/// with noise statistics averaged over `trials` noise-only records and all
/// windows. Throws NumericError when the scene has no noise.
std::vector<SnrPair> output_snr_gain(const Scene& scene, const PtftConfig& cfg, int trials);

}  // namespace hsdoa
