#include "doctest.h"

#include <algorithm>
#include <cmath>

#include "hsdoa/errors.hpp"
#include "hsdoa/estimators.hpp"
#include "support/gen.hpp"

using namespace hsdoa;
using hsdoa::testing::Gen;

namespace {

const ArrayGeometry kGeom;

const SensingMatrix& default_matrix() {
  static const SensingMatrix s = sensing_matrix(kGeom, 200.0, angle_grid());
  return s;
}

FdSnapshot snapshot(const CVector& z) { return FdSnapshot{z, 10000.0, 10200.0}; }

CVector atom(double theta) { return fd_steering(kGeom, 200.0, theta).entries; }

std::size_t grid_index(double theta) { return static_cast<std::size_t>(std::lround((theta + 90.0) * 10.0)); }

DoaSpectrum from_values(std::vector<double> v) {
  DoaSpectrum s;
  s.values = Eigen::Map<RVector>(v.data(), static_cast<Eigen::Index>(v.size()));
  return s;
}

// Local maxima by direct scan; the independent reading used against extract_peaks.
std::vector<std::size_t> local_maxima(const RVector& v) {
  std::vector<std::size_t> out;
  for (Eigen::Index i = 1; i + 1 < v.size(); ++i)
    if (v[i] > v[i - 1] && v[i] > v[i + 1]) out.push_back(static_cast<std::size_t>(i));
  return out;
}

}  // namespace

TEST_CASE("cbf_spectrum") {
  const auto& a = default_matrix();

  SUBCASE("matched steering vector") {
    const auto s = cbf_spectrum(snapshot(atom(0.0)), a);
    Eigen::Index best = 0;
    CHECK(s.values.maxCoeff(&best) == doctest::Approx(1.0));
    CHECK(a.grid_deg[static_cast<std::size_t>(best)] == 0.0);
    CHECK(s.values.minCoeff() >= 0.0);
    CHECK(s.values.size() == 1801);
    CHECK_FALSE(s.empty);
  }

  SUBCASE("zero snapshot") {
    const auto s = cbf_spectrum(snapshot(CVector::Zero(16)), a);
    CHECK(s.empty);
    CHECK(s.values.cwiseAbs().maxCoeff() == 0.0);
  }

  SUBCASE("two noiseless sources against direct evaluation") {
    const CVector z = atom(0.0) + atom(15.0);
    const auto s = cbf_spectrum(snapshot(z), a);
    for (const std::size_t n : {0UL, 450UL, 900UL, 1050UL, 1800UL}) {
      const double direct = std::norm(atom(a.grid_deg[n]).dot(z)) / (16.0 * z.squaredNorm());
      CHECK(s.values[static_cast<Eigen::Index>(n)] == doctest::Approx(direct).epsilon(1e-12));
    }
    // In-phase sources 2 null-widths apart pull each other's peak outward by 0.8 deg;
    // the oracle is the direct-evaluation local maxima.
    std::vector<double> direct(a.grid_deg.size());
    for (std::size_t n = 0; n < direct.size(); ++n) direct[n] = std::norm(atom(a.grid_deg[n]).dot(z));
    const Eigen::Map<RVector> dv(direct.data(), static_cast<Eigen::Index>(direct.size()));
    std::vector<double> oracle;
    for (const auto i : local_maxima(dv))
      if (direct[i] > 0.5 * dv.maxCoeff()) oracle.push_back(a.grid_deg[i]);
    REQUIRE(oracle.size() == 2);
    const auto peaks = extract_peaks(s, a.grid_deg, 2);
    REQUIRE(peaks.size() == 2);
    std::vector<double> found{peaks[0].theta_deg, peaks[1].theta_deg};
    std::sort(found.begin(), found.end());
    CHECK(found == oracle);
    CHECK(std::abs(found[0] - 0.0) <= 1.0);
    CHECK(std::abs(found[1] - 15.0) <= 1.0);

    // CBF valley between the sources is shallower than the CFD reconstruction's.
    const auto cfd = cfd_spectrum(snapshot(z), a, L1Options{});
    const auto valley = [&](const RVector& v) {
      const double lo = v.segment(static_cast<Eigen::Index>(grid_index(0.0)), 151).minCoeff();
      return lo / v.maxCoeff();
    };
    CHECK(valley(s.values) > valley(cfd.values));
  }

  SUBCASE("wrong length") { CHECK_THROWS_AS(cbf_spectrum(snapshot(CVector::Ones(15)), a), ParameterError); }
}

TEST_CASE("music_spectrum") {
  const auto& a = default_matrix();

  SUBCASE("rank-one covariance diverges at the source") {
    const std::vector<FdSnapshot> z(20, snapshot(atom(0.0)));
    const auto s = music_spectrum(z, a, 1);
    Eigen::Index best = 0;
    CHECK(s.values.maxCoeff(&best) == 1e12);
    CHECK(best == static_cast<Eigen::Index>(grid_index(0.0)));
    CHECK(s.values[static_cast<Eigen::Index>(grid_index(2.0))] < 1e6);
    CHECK(s.values.allFinite());
  }

  SUBCASE("two far sources at high SNR") {
    Gen gen(31, 0);
    std::vector<FdSnapshot> z;
    const double noise = std::sqrt(std::pow(10.0, -20.0 / 10.0) / 2.0);
    for (int w = 0; w < 98; ++w)
      z.push_back(snapshot(gen.complex_normal() * atom(-20.0) + gen.complex_normal() * atom(30.0) +
                           noise * gen.complex_vector(16)));
    const auto s = music_spectrum(z, a, 2);
    const auto peaks = extract_peaks(s, a.grid_deg, 2);
    REQUIRE(peaks.size() == 2);
    std::vector<double> found{peaks[0].theta_deg, peaks[1].theta_deg};
    std::sort(found.begin(), found.end());
    CHECK(std::abs(found[0] + 20.0) <= 0.2);
    CHECK(std::abs(found[1] - 30.0) <= 0.2);
  }

  SUBCASE("noise only") {
    Gen gen(32, 0);
    std::vector<FdSnapshot> z;
    for (int w = 0; w < 98; ++w) z.push_back(snapshot(gen.complex_vector(16)));
    const auto ratio_to_median = [](const RVector& values) {
      std::vector<double> v(values.data(), values.data() + values.size());
      std::nth_element(v.begin(), v.begin() + static_cast<long>(v.size() / 2), v.end());
      return values.maxCoeff() / v[v.size() / 2];
    };
    // A 15-dimensional noise subspace averages out; a single noise eigenvector
    // is a degree-15 polynomial whose near-unit-circle roots spike.
    CHECK(ratio_to_median(music_spectrum(z, a, 1).values) <= 10.0);
    const auto thin = music_spectrum(z, a, 15);
    CHECK(thin.values.allFinite());
    CHECK(thin.values.minCoeff() > 0.0);
  }

  SUBCASE("errors") {
    const std::vector<FdSnapshot> z(20, snapshot(atom(0.0)));
    CHECK_THROWS_AS(music_spectrum(z, a, 16), ParameterError);
    CHECK_THROWS_AS(music_spectrum(z, a, 0), ParameterError);
    CHECK_THROWS_AS(music_spectrum({snapshot(atom(0.0))}, a, 2), ParameterError);
  }
}

TEST_CASE("cfd_spectrum") {
  const auto& a = default_matrix();

  SUBCASE("single on-grid source") {
    L1Solution sol;
    const auto s = cfd_spectrum(snapshot(3.7 * atom(-33.3)), a, L1Options{}, std::nullopt, &sol);
    Eigen::Index best = 0;
    s.values.maxCoeff(&best);
    CHECK(a.grid_deg[static_cast<std::size_t>(best)] == doctest::Approx(-33.3));
    CHECK(s.values.isApprox(sol.x.cwiseAbs()));
    CHECK(s.estimator == "cfd");
    // Energy concentrates on the true cell.
    CHECK(s.values[best] >= 0.5 * s.values.sum());
  }

  SUBCASE("accelerated iterate without the polish keeps the argmax") {
    for (const double theta : {-60.0, -33.3, 0.0, 7.7, 15.0, 40.0}) {
      CAPTURE(theta);
      const auto s = cfd_spectrum(snapshot(atom(theta)), a, L1Options{.polish = false});
      Eigen::Index best = 0;
      s.values.maxCoeff(&best);
      CHECK(a.grid_deg[static_cast<std::size_t>(best)] == doctest::Approx(theta));
      const auto lo = static_cast<Eigen::Index>(grid_index(theta - 2.0));
      CHECK(s.values.segment(lo, 41).sum() >= 0.95 * s.values.sum());
    }
  }

  SUBCASE("regularization above the data correlation gives an empty spectrum") {
    const CVector z = atom(10.0);
    const double mu = 2.0 * (a.columns.adjoint() * (z / z.norm())).cwiseAbs().maxCoeff();
    const auto s = cfd_spectrum(snapshot(z), a, L1Options{.mu = mu});
    CHECK(s.empty);
    CHECK(s.values.maxCoeff() == 0.0);
    CHECK(cfd_spectrum(snapshot(CVector::Zero(16)), a, L1Options{}).empty);
  }
}

TEST_CASE("extract_peaks") {
  std::vector<double> grid(11);
  for (int i = 0; i < 11; ++i) grid[static_cast<std::size_t>(i)] = -5.0 + i;

  SUBCASE("two bumps") {
    const auto s = from_values({0, 1, 3, 1, 0, 0, 2, 5, 2, 0, 0});
    const auto p = extract_peaks(s, grid, 4);
    REQUIRE(p.size() == 2);
    CHECK(p[0].theta_deg == 2.0);
    CHECK(p[0].amplitude == 5.0);
    CHECK(p[1].theta_deg == -3.0);
    CHECK(p[1].index == 2);
  }

  SUBCASE("monotone spectra keep only the larger endpoint") {
    const auto up = extract_peaks(from_values({0, 1, 2, 3, 4, 5, 6, 7, 8, 9, 10}), grid, 4);
    REQUIRE(up.size() == 1);
    CHECK(up[0].theta_deg == 5.0);
    const auto down = extract_peaks(from_values({10, 9, 8, 7, 6, 5, 4, 3, 2, 1, 0}), grid, 4);
    REQUIRE(down.size() == 1);
    CHECK(down[0].theta_deg == -5.0);
  }

  SUBCASE("plateau counts once at its leftmost index; ties go to the smaller angle") {
    const auto p = extract_peaks(from_values({0, 2, 2, 2, 0, 1, 0, 2, 0, 0, 0}), grid, 4);
    REQUIRE(p.size() == 3);
    CHECK(p[0].theta_deg == -4.0);
    CHECK(p[1].theta_deg == 2.0);
    CHECK(p[2].theta_deg == 0.0);
  }

  SUBCASE("flat and truncated") {
    CHECK(extract_peaks(from_values(std::vector<double>(11, 1.0)), grid, 4).empty());
    CHECK(extract_peaks(from_values({0, 1, 3, 1, 0, 0, 2, 5, 2, 0, 0}), grid, 1).size() == 1);
  }

  SUBCASE("random spectra against a direct scan") {
    for (std::uint64_t c = 0; c < 100; ++c) {
      Gen gen(33, c);
      std::vector<double> v(11);
      for (auto& x : v) x = gen.uniform(0.0, 1.0);
      const auto s = from_values(v);
      const auto p = extract_peaks(s, grid, 20);
      auto expected = local_maxima(s.values);
      if (v[0] > v[1]) expected.push_back(0);
      if (v[10] > v[9]) expected.push_back(10);
      CHECK(p.size() == expected.size());
      for (std::size_t i = 1; i < p.size(); ++i) CHECK(p[i].amplitude < p[i - 1].amplitude);
      for (const auto& pk : p) CHECK(std::find(expected.begin(), expected.end(), static_cast<std::size_t>(pk.index)) != expected.end());
    }
  }

  SUBCASE("errors") {
    const auto s = from_values({0, 1, 0});
    CHECK_THROWS_AS(extract_peaks(s, grid, 1), ParameterError);
    CHECK_THROWS_AS(extract_peaks(s, {0.0, 1.0, 2.0}, 0), ParameterError);
  }
}

TEST_CASE("incoherent_average") {
  SUBCASE("identical inputs") {
    const auto s = from_values({0.0, 0.5, 1.0, 0.25});
    const auto avg = incoherent_average({s, s, s});
    CHECK(avg.values.isApprox(s.values));
  }

  SUBCASE("disjoint peaks become half-height peaks after unit-max scaling") {
    const auto avg = incoherent_average({from_values({0, 4, 0, 0, 0}), from_values({0, 0, 0, 0.2, 0})});
    CHECK(avg.values[1] == doctest::Approx(0.5));
    CHECK(avg.values[3] == doctest::Approx(0.5));
    CHECK(avg.values.sum() == doctest::Approx(1.0));
  }

  SUBCASE("zero spectra are skipped") {
    const auto avg = incoherent_average({from_values({0, 0, 0}), from_values({0, 2, 1})});
    CHECK(avg.values[1] == doctest::Approx(1.0));
    CHECK(avg.values[2] == doctest::Approx(0.5));
    CHECK(incoherent_average({from_values({0, 0, 0})}).empty);
  }

  SUBCASE("errors") {
    CHECK_THROWS_AS(incoherent_average({}), ParameterError);
    CHECK_THROWS_AS(incoherent_average({from_values({1, 0}), from_values({1, 0, 0})}), ParameterError);
  }
}
