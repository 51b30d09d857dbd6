#include "hsdoa/histogram.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "json.hpp"

#include "hsdoa/errors.hpp"

namespace hsdoa {
namespace {

void check_pool(const std::vector<double>& pool) {
  for (const double t : pool)
    if (!(t >= -90.0 && t <= 90.0)) throw ParameterError("pooled angle outside [-90, 90]");
}

void check_zeta(double zeta_deg) {
  if (!(zeta_deg > 0.0 && zeta_deg <= 180.0)) throw ParameterError("bin width must be in (0, 180]");
}

}  // namespace

std::size_t coarse_bin_index(double theta_deg, double zeta_deg, std::size_t bin_count) {
  const auto b = static_cast<std::size_t>(std::floor((theta_deg + 90.0) / zeta_deg));
  return std::min(b, bin_count - 1);
}

CoarseHistogram coarse_histogram(const std::vector<double>& pool, double zeta_deg) {
  check_zeta(zeta_deg);
  check_pool(pool);
  CoarseHistogram h;
  h.zeta_deg = zeta_deg;
  const auto bins = static_cast<std::size_t>(std::ceil(180.0 / zeta_deg - 1e-9));
  for (std::size_t b = 0; b < bins; ++b) h.left_edges.push_back(-90.0 + static_cast<double>(b) * zeta_deg);
  h.counts.assign(bins, 0);
  for (const double t : pool) ++h.counts[coarse_bin_index(t, zeta_deg, bins)];
  return h;
}

CoarseSelection coarse_select(const std::vector<double>& pool, double zeta_deg, int k) {
  if (k < 1) throw ParameterError("number of targets must be at least 1");
  if (pool.empty()) throw ParameterError("coarse_select: empty angle pool");
  CoarseSelection sel;
  sel.histogram = coarse_histogram(pool, zeta_deg);
  const auto& counts = sel.histogram.counts;

  std::vector<std::size_t> order(counts.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return counts[a] > counts[b]; });

  std::vector<std::size_t> chosen;
  for (const std::size_t b : order) {
    if (static_cast<int>(chosen.size()) == k || counts[b] == 0) break;
    const bool adjacent = std::any_of(chosen.begin(), chosen.end(), [&](std::size_t c) {
      return b + 1 == c || c + 1 == b;
    });
    if (adjacent) continue;
    chosen.push_back(b);
    sel.left_edges.push_back(sel.histogram.left_edges[b]);
  }
  if (static_cast<int>(chosen.size()) < k)
    sel.warning = "only " + std::to_string(chosen.size()) + " of " + std::to_string(k) +
                  " coarse bins could be selected";
  return sel;
}

RefinedBin refine_bin(const std::vector<double>& pool, double left_edge, double zeta_deg) {
  check_zeta(zeta_deg);
  RefinedBin r;
  r.left_edge = left_edge;
  const double half = 0.5 * zeta_deg;
  r.lo = {left_edge - half, left_edge, left_edge + half};
  r.hi = {left_edge + half, left_edge + zeta_deg, left_edge + 3.0 * half};
  for (const double t : pool)
    for (std::size_t i = 0; i < 3; ++i)
      if (t >= r.lo[i] && t <= r.hi[i]) ++r.counts[i];
  r.chosen = 1;
  if (r.counts[0] > r.counts[r.chosen]) r.chosen = 0;
  if (r.counts[2] > r.counts[static_cast<std::size_t>(r.chosen)]) r.chosen = 2;
  return r;
}

EstimationResult estimate_doas(const std::vector<double>& pool, double zeta_deg, int k) {
  auto sel = coarse_select(pool, zeta_deg, k);
  EstimationResult res;
  res.warning = sel.warning;
  struct Item {
    double theta;
    RefinedBin bin;
    int support;
  };
  std::vector<Item> items;
  for (const double edge : sel.left_edges) {
    RefinedBin bin = refine_bin(pool, edge, zeta_deg);
    double sum = 0.0;
    int n = 0;
    for (const double t : pool) {
      if (t >= bin.chosen_lo() && t <= bin.chosen_hi()) {
        sum += t;
        ++n;
      }
    }
    if (n == 0) throw InternalError("chosen histogram interval holds no pooled angle");
    items.push_back({sum / n, bin, n});
  }
  std::stable_sort(items.begin(), items.end(),
                   [](const Item& a, const Item& b) { return a.theta < b.theta; });
  for (auto& it : items) {
    res.theta_deg.push_back(it.theta);
    res.bins.push_back(it.bin);
    res.support.push_back(it.support);
  }
  return res;
}

EstimationResult estimate_doas(const PeakCollection& peaks, double zeta_deg, int k) {
  return estimate_doas(peaks.flattened(), zeta_deg, k);
}

std::string to_json(const EstimationResult& r) {
  nlohmann::json j;
  j["theta_deg"] = r.theta_deg;
  auto bins = nlohmann::json::array();
  auto counts = nlohmann::json::array();
  for (std::size_t i = 0; i < r.bins.size(); ++i) {
    const auto& b = r.bins[i];
    bins.push_back({{"left_edge_deg", b.left_edge},
                    {"interval_deg", {b.chosen_lo(), b.chosen_hi()}},
                    {"chosen", b.chosen + 1}});
    counts.push_back({{"chi", b.counts}, {"support", r.support[i]}});
  }
  j["bins"] = bins;
  j["counts"] = counts;
  if (r.warning) j["warning"] = *r.warning;
  return j.dump(2);
}

}  // namespace hsdoa
