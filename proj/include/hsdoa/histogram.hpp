#pragma once

// Coarse-to-fine histogram statistics over pooled per-frequency peak angles.
//
// Real DOAs recur at the same angle for every frequency pair while FD cross
// terms wander with f_w, so counting pooled peaks in coarse bins isolates the
// K real directions. Each winning bin is then re-centered by choosing the best
// of three half-overlapping intervals, and the estimate is the mean of the
// pooled angles inside it.

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "hsdoa/estimators.hpp"

namespace hsdoa {

struct CoarseHistogram {
  double zeta_deg = 2.0;
  std::vector<double> left_edges;  ///< -90, -90 + zeta, ...
  std::vector<int> counts;
};

/// Coarse bin index of an angle; the last bin is right-closed at 90.
std::size_t coarse_bin_index(double theta_deg, double zeta_deg, std::size_t bin_count);

CoarseHistogram coarse_histogram(const std::vector<double>& pool, double zeta_deg);

struct CoarseSelection {
  CoarseHistogram histogram;
  std::vector<double> left_edges;  ///< selected bins, in selection order
  std::optional<std::string> warning;
};

/// Highest-count bins, skipping neighbors of already chosen bins. Ties go to
/// the lower edge. Returns fewer than K bins with a warning when the pool runs out.
CoarseSelection coarse_select(const std::vector<double>& pool, double zeta_deg, int k);

struct RefinedBin {
  double left_edge = 0.0;  ///< B_k
  std::array<double, 3> lo{};
  std::array<double, 3> hi{};
  std::array<int, 3> counts{};
  int chosen = 1;  ///< 0-based index of the winning interval

  double chosen_lo() const { return lo[static_cast<std::size_t>(chosen)]; }
  double chosen_hi() const { return hi[static_cast<std::size_t>(chosen)]; }
};

/// Counts the pool in [B - z/2, B + z/2], [B, B + z], [B + z/2, B + 3z/2]
/// (closed) and picks the maximum; ties prefer the middle, then left, then right.
RefinedBin refine_bin(const std::vector<double>& pool, double left_edge, double zeta_deg);

struct EstimationResult {
  std::vector<double> theta_deg;  ///< ascending
  std::vector<RefinedBin> bins;   ///< aligned with theta_deg
  std::vector<int> support;       ///< pooled angles averaged per estimate
  std::optional<std::string> warning;
};

EstimationResult estimate_doas(const std::vector<double>& pool, double zeta_deg, int k);
EstimationResult estimate_doas(const PeakCollection& peaks, double zeta_deg, int k);

/// {"theta_deg": [...], "bins": [...], "counts": [...]}.
std::string to_json(const EstimationResult& r);

}  // namespace hsdoa
