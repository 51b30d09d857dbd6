#include "hsdoa/estimators.hpp"

#include <algorithm>
#include <cmath>

#include "hsdoa/errors.hpp"

namespace hsdoa {

std::vector<double> PeakCollection::flattened() const {
  std::vector<double> out;
  for (const auto& set : per_w)
    for (const auto& p : set.peaks) out.push_back(p.theta_deg);
  return out;
}

namespace {

DoaSpectrum tagged(const FdSnapshot& z, std::string tag) {
  DoaSpectrum s;
  s.estimator = std::move(tag);
  s.f_low_hz = z.f_low_hz;
  s.f_high_hz = z.f_high_hz;
  return s;
}

}  // namespace

DoaSpectrum cbf_spectrum(const FdSnapshot& z, const SensingMatrix& a) {
  if (z.z.size() != a.columns.rows()) throw ParameterError("CBF: snapshot length != sensors");
  auto s = tagged(z, "fdcbf");
  const double energy = z.z.squaredNorm();
  if (energy == 0.0) {
    s.values = RVector::Zero(a.grid_size());
    s.empty = true;
    return s;
  }
  const double m = static_cast<double>(a.columns.rows());
  s.values = (a.columns.adjoint() * z.z).cwiseAbs2() / (m * energy);
  return s;
}

DoaSpectrum music_spectrum(const std::vector<FdSnapshot>& snapshots, const SensingMatrix& a,
                           int signal_dim) {
  const Eigen::Index m = a.columns.rows();
  if (signal_dim < 1 || signal_dim >= m)
    throw ParameterError("MUSIC signal subspace dimension must lie in [1, M-1]");
  if (static_cast<int>(snapshots.size()) < signal_dim)
    throw ParameterError("MUSIC needs at least as many snapshots as the subspace dimension");
  CMatrix r = CMatrix::Zero(m, m);
  for (const auto& z : snapshots) {
    if (z.z.size() != m) throw ParameterError("MUSIC: snapshot length != sensors");
    r.noalias() += z.z * z.z.adjoint();
  }
  r /= static_cast<double>(snapshots.size());
  Eigen::SelfAdjointEigenSolver<CMatrix> eig(r);
  if (eig.info() != Eigen::Success) throw NumericError("MUSIC eigendecomposition failed");
  // Eigenvalues ascend; the first M - K columns span the noise subspace.
  const CMatrix noise = eig.eigenvectors().leftCols(m - signal_dim);
  const RVector denom = (noise.adjoint() * a.columns).cwiseAbs2().colwise().sum().transpose();

  DoaSpectrum s;
  s.estimator = "fdmusic";
  if (!snapshots.empty()) {
    s.f_low_hz = snapshots.front().f_low_hz;
    s.f_high_hz = snapshots.back().f_high_hz;
  }
  constexpr double kCap = 1e12;
  s.values.resize(a.grid_size());
  for (Eigen::Index n = 0; n < denom.size(); ++n)
    s.values[n] = denom[n] * kCap <= 1.0 ? kCap : 1.0 / denom[n];
  return s;
}

DoaSpectrum cfd_spectrum(const FdSnapshot& z, const SensingMatrix& a, const L1Options& opt,
                         std::optional<double> lipschitz, L1Solution* solution) {
  if (z.z.size() != a.columns.rows()) throw ParameterError("CFD: snapshot length != sensors");
  auto s = tagged(z, "cfd");
  const double norm = z.z.norm();
  if (norm == 0.0) {
    s.values = RVector::Zero(a.grid_size());
    s.empty = true;
    return s;
  }
  auto sol = solve_l1(a.columns, z.z / norm, opt, lipschitz);
  s.values = sol.x.cwiseAbs();
  s.empty = (s.values.array() == 0.0).all();
  if (solution != nullptr) *solution = std::move(sol);
  return s;
}

std::vector<Peak> extract_peaks(const DoaSpectrum& s, const std::vector<double>& grid_deg,
                                std::size_t count) {
  if (count < 1) throw ParameterError("peak count must be at least 1");
  const Eigen::Index n = s.values.size();
  if (static_cast<std::size_t>(n) != grid_deg.size())
    throw ParameterError("spectrum length does not match grid");
  std::vector<Peak> peaks;
  Eigen::Index i = 0;
  while (i < n) {
    // [i, j] is a run of equal values.
    Eigen::Index j = i;
    while (j + 1 < n && s.values[j + 1] == s.values[i]) ++j;
    const bool left_ok = i == 0 || s.values[i - 1] < s.values[i];
    const bool right_ok = j == n - 1 || s.values[j + 1] < s.values[j];
    const bool whole = i == 0 && j == n - 1;
    if (left_ok && right_ok && !whole)
      peaks.push_back({grid_deg[static_cast<std::size_t>(i)], s.values[i], i});
    i = j + 1;
  }
  std::stable_sort(peaks.begin(), peaks.end(), [](const Peak& a, const Peak& b) {
    if (a.amplitude != b.amplitude) return a.amplitude > b.amplitude;
    return a.theta_deg < b.theta_deg;
  });
  if (peaks.size() > count) peaks.resize(count);
  return peaks;
}

DoaSpectrum incoherent_average(const std::vector<DoaSpectrum>& spectra) {
  if (spectra.empty()) throw ParameterError("incoherent_average needs at least one spectrum");
  const Eigen::Index n = spectra.front().values.size();
  DoaSpectrum out;
  out.estimator = spectra.front().estimator + "-avg";
  out.f_low_hz = spectra.front().f_low_hz;
  out.f_high_hz = spectra.back().f_high_hz;
  out.values = RVector::Zero(n);
  int used = 0;
  for (const auto& s : spectra) {
    if (s.values.size() != n) throw ParameterError("incoherent_average: grids differ");
    const double peak = s.values.size() ? s.values.maxCoeff() : 0.0;
    if (!(peak > 0.0)) continue;
    out.values += s.values / peak;
    ++used;
  }
  if (used == 0) {
    out.empty = true;
    return out;
  }
  out.values /= static_cast<double>(used);
  return out;
}

}  // namespace hsdoa
