#include "hsdoa/fd.hpp"

#include <algorithm>
#include <cmath>

#include "hsdoa/errors.hpp"

namespace hsdoa {

SteeringVector steering_vector(const ArrayGeometry& geom, double f_hz, double theta_deg) {
  geom.validate();
  if (!(std::abs(theta_deg) <= 90.0)) throw ParameterError("steering angle outside [-90, 90]");
  SteeringVector a;
  a.f_hz = f_hz;
  a.theta_deg = theta_deg;
  a.entries.resize(geom.sensors);
  for (int m = 0; m < geom.sensors; ++m) {
    const double cycles = f_hz * geom.delay(m, theta_deg);
    a.entries[m] = std::polar(1.0, -kTwoPi * (cycles - std::floor(cycles)));
  }
  return a;
}

SteeringVector fd_steering(const ArrayGeometry& geom, double delta_f_hz, double theta_deg) {
  return steering_vector(geom, delta_f_hz, theta_deg);
}

FdSnapshot fd_snapshot(const CVector& y_lo, const CVector& y_hi, double f_low_hz, double f_high_hz) {
  if (y_lo.size() != y_hi.size()) throw ParameterError("FD snapshot: length mismatch");
  FdSnapshot s;
  s.z = y_hi.cwiseProduct(y_lo.conjugate());
  s.f_low_hz = f_low_hz;
  s.f_high_hz = f_high_hz;
  return s;
}

std::vector<double> angle_grid(double first_deg, double last_deg, double step_deg) {
  if (!(step_deg > 0.0) || last_deg < first_deg) throw ParameterError("bad angle grid");
  const auto n = static_cast<std::size_t>(std::llround((last_deg - first_deg) / step_deg)) + 1;
  std::vector<double> g(n);
  for (std::size_t i = 0; i < n; ++i) {
    // Round to 1e-9 deg so grid values print and compare cleanly.
    const double v = first_deg + static_cast<double>(i) * step_deg;
    g[i] = std::round(v * 1e9) / 1e9;
  }
  g.back() = std::min(g.back(), last_deg);
  return g;
}

SensingMatrix sensing_matrix(const ArrayGeometry& geom, double delta_f_hz,
                             const std::vector<double>& grid_deg) {
  if (grid_deg.empty()) throw ParameterError("sensing matrix needs a nonempty grid");
  if (!std::is_sorted(grid_deg.begin(), grid_deg.end()))
    throw ParameterError("sensing matrix grid must be sorted ascending");
  SensingMatrix a;
  a.grid_deg = grid_deg;
  a.delta_f_hz = delta_f_hz;
  a.columns.resize(geom.sensors, static_cast<Eigen::Index>(grid_deg.size()));
  for (std::size_t n = 0; n < grid_deg.size(); ++n)
    a.columns.col(static_cast<Eigen::Index>(n)) = fd_steering(geom, delta_f_hz, grid_deg[n]).entries;
  return a;
}

AmbiguityReport ambiguity_scan(const ArrayGeometry& geom, double f_hz,
                               const std::vector<double>& grid_deg, double min_separation_deg) {
  if (grid_deg.size() < 2) throw ParameterError("ambiguity scan needs at least two angles");
  if (min_separation_deg < 0.0) min_separation_deg = 2.0 * std::abs(grid_deg[1] - grid_deg[0]);
  CMatrix a(geom.sensors, static_cast<Eigen::Index>(grid_deg.size()));
  for (std::size_t n = 0; n < grid_deg.size(); ++n)
    a.col(static_cast<Eigen::Index>(n)) = steering_vector(geom, f_hz, grid_deg[n]).entries;
  const CMatrix gram = a.adjoint() * a;
  AmbiguityReport r;
  const double m = static_cast<double>(geom.sensors);
  for (Eigen::Index j = 0; j < gram.cols(); ++j) {
    for (Eigen::Index i = 0; i < j; ++i) {
      if (std::abs(grid_deg[j] - grid_deg[i]) <= min_separation_deg) continue;
      const double c = std::abs(gram(i, j)) / m;
      if (c > r.max_coherence) r = {c, grid_deg[i], grid_deg[j]};
    }
  }
  return r;
}

}  // namespace hsdoa
