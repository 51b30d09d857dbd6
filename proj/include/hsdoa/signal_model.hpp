#pragma once

// Array geometry, LFM pulse definition and synthesis of sparse-ULA recordings.

#include <cstdint>
#include <span>
#include <vector>

#include "hsdoa/types.hpp"

namespace hsdoa {

/// Uniform linear array. Sensor 1 is the phase reference.
struct ArrayGeometry {
  int sensors = 16;          ///< M
  double spacing_m = 3.75;   ///< d
  double speed_mps = 1500.;  ///< c

  void validate() const;

  /// Propagation delay of sensor `m` (0-based) relative to sensor 0 for a plane
  /// wave from `theta_deg`: m * d * sin(theta) / c.
  double delay(int m, double theta_deg) const;

  /// Largest frequency spacing for which the array is unambiguous, c / (2d).
  double max_unambiguous_frequency() const { return speed_mps / (2.0 * spacing_m); }
};

struct LfmPulse {
  double f_low_hz = 10e3;
  double f_high_hz = 20e3;
  double duration_s = 1.0;  ///< T
  double record_s = 1.0;    ///< Tall
  double fs_hz = 50e3;

  void validate() const;
  double bandwidth() const { return f_high_hz - f_low_hz; }
  double center() const { return 0.5 * (f_low_hz + f_high_hz); }
  std::size_t sample_count() const;
  /// DFT bin spacing of a full record.
  double bin_spacing() const { return fs_hz / static_cast<double>(sample_count()); }
};

struct Target {
  double theta_deg = 0.0;
  cplx amplitude{1.0, 0.0};
  double delay_s = 0.0;  ///< arrival delay at sensor 1
};

struct Scene {
  ArrayGeometry geometry;
  LfmPulse pulse;
  std::vector<Target> targets;
  double noise_power = 0.0;  ///< E[n(t)^2] per sensor sample
  std::uint64_t seed = 0;

  void validate() const;
};

/// Real sensor recordings, one row per sensor.
struct SampledWaveforms {
  RMatrix samples;  ///< M x N
  double fs_hz = 0.0;

  int sensors() const { return static_cast<int>(samples.rows()); }
  std::size_t length() const { return static_cast<std::size_t>(samples.cols()); }
};

/// Positive-frequency half of the per-sensor DFT. Bin k sits at k * df.
struct SpectrumMatrix {
  CMatrix bins;  ///< M x (N/2 + 1)
  double df_hz = 0.0;
  std::size_t record_length = 0;  ///< N of the transformed record

  int sensors() const { return static_cast<int>(bins.rows()); }
  Eigen::Index bin_count() const { return bins.cols(); }
};

/// Unit-amplitude chirp cos(2*pi*(fL*t + B*t^2/(2T))) on [0, T), zero up to Tall.
std::vector<double> lfm_waveform(const LfmPulse& pulse);

/// Sum of delayed, scaled pulse copies per sensor plus white Gaussian noise.
///
/// Delays are applied as per-bin phase ramps on the DFT of the pulse, so the
/// noiseless spectra obey the frequency-domain data model exactly at every
/// bin. The noise stream is a pure function of (scene.seed, trial).
SampledWaveforms synthesize_received(const Scene& scene, std::uint64_t trial = 0);

/// Noise-free variant of synthesize_received.
SampledWaveforms synthesize_signal(const Scene& scene);

/// White noise only, same stream as synthesize_received for (seed, trial).
SampledWaveforms synthesize_noise(const Scene& scene, std::uint64_t trial = 0);

/// Per-sample noise power for an input SNR of |b|^2 / E[|n|^2].
double noise_power_for_snr(double snr_db, double amplitude);

SpectrumMatrix spectra(const SampledWaveforms& w);

/// Stationary-phase spectrum of the analytic chirp:
/// Rect((f - fc)/B) * sqrt(T/B) e^{j pi/4} e^{-j pi T (f - fL)^2 / B}.
cplx analytic_lfm_spectrum(const LfmPulse& pulse, double f_hz);

}  // namespace hsdoa
