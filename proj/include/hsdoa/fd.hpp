#pragma once

// Steering vectors, frequency-difference snapshots and sensing matrices.

#include <memory>
#include <vector>

#include "hsdoa/signal_model.hpp"
#include "hsdoa/types.hpp"

namespace hsdoa {

struct SteeringVector {
  CVector entries;
  double f_hz = 0.0;
  double theta_deg = 0.0;
};

/// entries[m] = exp(-j 2 pi f m d sin(theta) / c), m = 0..M-1.
SteeringVector steering_vector(const ArrayGeometry& geom, double f_hz, double theta_deg);

/// Steering vector of the difference frequency; a(f2) .* conj(a(f1)) = a(f2 - f1).
SteeringVector fd_steering(const ArrayGeometry& geom, double delta_f_hz, double theta_deg);

struct FdSnapshot {
  CVector z;
  double f_low_hz = 0.0;
  double f_high_hz = 0.0;
};

/// z = y_hi .* conj(y_lo).
FdSnapshot fd_snapshot(const CVector& y_lo, const CVector& y_hi, double f_low_hz, double f_high_hz);

/// Uniform angle grid from `first_deg` to `last_deg` inclusive.
std::vector<double> angle_grid(double first_deg = -90.0, double last_deg = 90.0,
                               double step_deg = 0.1);

struct SensingMatrix {
  CMatrix columns;  ///< M x N_grid, column n = a(delta_f, grid[n])
  std::vector<double> grid_deg;
  double delta_f_hz = 0.0;

  Eigen::Index grid_size() const { return columns.cols(); }
};

SensingMatrix sensing_matrix(const ArrayGeometry& geom, double delta_f_hz,
                             const std::vector<double>& grid_deg);

struct AmbiguityReport {
  double max_coherence = 0.0;
  double theta_a_deg = 0.0;
  double theta_b_deg = 0.0;
};

/// Largest |a(f, ti)^H a(f, tj)| / M over grid pairs with |ti - tj| > min_separation_deg.
/// A negative separation selects the default of two grid steps.
AmbiguityReport ambiguity_scan(const ArrayGeometry& geom, double f_hz,
                               const std::vector<double>& grid_deg,
                               double min_separation_deg = -1.0);

}  // namespace hsdoa
