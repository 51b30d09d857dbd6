#pragma once

// Per-frequency-pair DOA spectra (FD-CBF, FD-MUSIC, CFD), peak picking and
// incoherent averaging.

#include <string>
#include <vector>

#include "hsdoa/fd.hpp"
#include "hsdoa/l1_solver.hpp"
#include "hsdoa/types.hpp"

namespace hsdoa {

struct DoaSpectrum {
  RVector values;  ///< over SensingMatrix::grid_deg, non-negative
  std::string estimator;
  int w = 0;       ///< 1-based frequency-pair index, 0 for pulse-level spectra
  double f_low_hz = 0.0;
  double f_high_hz = 0.0;
  bool empty = false;  ///< all-zero spectrum
};

struct Peak {
  double theta_deg = 0.0;
  double amplitude = 0.0;
  Eigen::Index index = 0;
};

/// Peak angles of one frequency pair.
struct PeakSet {
  int w = 0;
  std::vector<Peak> peaks;
};

struct PeakCollection {
  std::vector<PeakSet> per_w;

  /// All peak angles, in w order.
  std::vector<double> flattened() const;
};

/// |a(df, theta)^H z|^2 / (M ||z||^2); equals 1 iff z is parallel to a grid steering vector.
DoaSpectrum cbf_spectrum(const FdSnapshot& z, const SensingMatrix& a);

/// MUSIC pseudo-spectrum of the FD snapshots' sample covariance with a
/// `signal_dim`-dimensional signal subspace. Values are capped at 1e12.
DoaSpectrum music_spectrum(const std::vector<FdSnapshot>& snapshots, const SensingMatrix& a,
                           int signal_dim);

/// |x| of the L1 reconstruction of z / ||z||.
DoaSpectrum cfd_spectrum(const FdSnapshot& z, const SensingMatrix& a, const L1Options& opt,
                         std::optional<double> lipschitz = std::nullopt,
                         L1Solution* solution = nullptr);

/// Up to `count` local maxima, strongest first. A plateau counts once at its
/// leftmost index; grid endpoints qualify when they exceed their neighbor.
std::vector<Peak> extract_peaks(const DoaSpectrum& s, const std::vector<double>& grid_deg,
                                std::size_t count);

/// Mean of the spectra after scaling each to unit maximum; all-zero spectra are skipped.
DoaSpectrum incoherent_average(const std::vector<DoaSpectrum>& spectra);

}  // namespace hsdoa
