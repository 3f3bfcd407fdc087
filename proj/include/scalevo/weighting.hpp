#pragma once

#include <algorithm>
#include <cmath>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "scalevo/error.hpp"
#include "scalevo/rng.hpp"
#include "scalevo/scale.hpp"

namespace scalevo {

inline constexpr std::size_t kDefaultRegionCap = 20;

inline std::map<std::string, std::size_t> region_counts(std::span<const Scale> scales) {
  std::map<std::string, std::size_t> counts;
  for (const auto& s : scales) ++counts[s.region()];
  return counts;
}

/// omega_i = 1 / min(count of the scale's region, R0).
inline std::vector<double> region_weights(std::span<const Scale> scales, std::size_t r0 = kDefaultRegionCap) {
  if (r0 < 1) throw ValidationError("region_weights: R0 must be >= 1");
  const auto counts = region_counts(scales);
  std::vector<double> w;
  w.reserve(scales.size());
  for (const auto& s : scales) w.push_back(1.0 / static_cast<double>(std::min(counts.at(s.region()), r0)));
  return w;
}

/// Gini coefficient: half the relative mean absolute difference.
inline double gini(std::span<const double> counts) {
  if (counts.empty()) throw ValidationError("gini: empty input");
  double total = 0.0;
  for (double c : counts) {
    if (!(c >= 0.0)) throw ValidationError("gini: counts must be non-negative");
    total += c;
  }
  if (!(total > 0.0)) throw ValidationError("gini: total count must be positive");
  std::vector<double> x(counts.begin(), counts.end());
  std::sort(x.begin(), x.end());
  // sum_{i,j} |x_i - x_j| = 2 sum_i (2i - n + 1) x_(i) for ascending x.
  const double n = static_cast<double>(x.size());
  double acc = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) acc += (2.0 * static_cast<double>(i) - n + 1.0) * x[i];
  return 2.0 * acc / (2.0 * n * total);
}

/// Counts per region capped at R0.
inline std::vector<double> capped_counts(std::span<const double> counts, double r0) {
  std::vector<double> out(counts.begin(), counts.end());
  for (double& c : out) c = std::min(c, r0);
  return out;
}

/// Draws min(count, R0) scales per region without replacement. Returns indices
/// into `scales`, ascending.
inline std::vector<std::size_t> bootstrap_regions(std::span<const Scale> scales, std::size_t r0, Rng& rng) {
  if (r0 < 1) throw ValidationError("bootstrap_regions: R0 must be >= 1");
  std::map<std::string, std::vector<std::size_t>> by_region;
  for (std::size_t i = 0; i < scales.size(); ++i) by_region[scales[i].region()].push_back(i);
  std::vector<std::size_t> out;
  for (auto& [region, idx] : by_region) {
    const std::size_t take = std::min(idx.size(), r0);
    for (std::size_t i = 0; i < take; ++i) std::swap(idx[i], idx[i + rng.index(idx.size() - i)]);
    out.insert(out.end(), idx.begin(), idx.begin() + static_cast<std::ptrdiff_t>(take));
  }
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace scalevo
