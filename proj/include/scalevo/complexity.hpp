#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <span>
#include <vector>

#include "scalevo/error.hpp"
#include "scalevo/scale.hpp"

namespace scalevo {

namespace complexity_presets {
inline constexpr double kVocal = 18.0;
inline constexpr double kInstrumental = 14.0;
inline constexpr double kTheory = 2.0;
inline constexpr double kValidation = 25.0;
}  // namespace complexity_presets

inline double default_complexity_w(ScaleType type) {
  switch (type) {
    case ScaleType::Vocal: return complexity_presets::kVocal;
    case ScaleType::Instrumental: return complexity_presets::kInstrumental;
    case ScaleType::Theory: return complexity_presets::kTheory;
  }
  return complexity_presets::kValidation;
}

struct ClusterResult {
  std::size_t k = 0;
  std::vector<std::size_t> assignment;  // per input value, clusters numbered by ascending mean
  double max_within_var = 0.0;
};

/// Ward agglomerative clustering of 1-D values, cut at the smallest number of
/// clusters whose largest within-cluster population variance is below w^2.
inline ClusterResult ward_categories(std::span<const double> values, double w) {
  if (values.empty()) throw ValidationError("ward_categories: need at least one value");
  if (!(w > 0.0)) throw ValidationError("ward_categories: w must be positive");
  const std::size_t n = values.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });

  struct Cluster {
    std::vector<std::size_t> members;  // positions in sorted order
    double sum = 0.0;
    double sum_sq = 0.0;
    double size() const { return static_cast<double>(members.size()); }
    double mean() const { return sum / size(); }
    double variance() const { return std::max(0.0, sum_sq / size() - mean() * mean()); }
  };
  // Shift by the median value to keep the sum-of-squares variance accurate.
  const double shift = values[order[n / 2]];
  std::vector<Cluster> clusters(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double v = values[order[i]] - shift;
    clusters[i] = Cluster{{i}, v, v * v};
  }

  const double limit = w * w;
  auto snapshot = [&]() {
    ClusterResult r;
    r.k = clusters.size();
    r.assignment.assign(n, 0);
    std::vector<std::size_t> idx(clusters.size());
    std::iota(idx.begin(), idx.end(), 0);
    std::stable_sort(idx.begin(), idx.end(),
                     [&](std::size_t a, std::size_t b) { return clusters[a].mean() < clusters[b].mean(); });
    for (std::size_t label = 0; label < idx.size(); ++label) {
      const auto& c = clusters[idx[label]];
      r.max_within_var = std::max(r.max_within_var, c.variance());
      for (std::size_t m : c.members) r.assignment[order[m]] = label;
    }
    return r;
  };

  // Walk the whole dendrogram and keep the last (smallest-k) level that passes.
  ClusterResult best = snapshot();
  while (clusters.size() > 1) {
    // Clusters stay ordered by their leftmost sorted position; ties keep the first pair.
    std::size_t ba = 0, bb = 1;
    double best_cost = std::numeric_limits<double>::infinity();
    for (std::size_t a = 0; a < clusters.size(); ++a) {
      for (std::size_t b = a + 1; b < clusters.size(); ++b) {
        const double na = clusters[a].size(), nb = clusters[b].size();
        const double d = clusters[a].mean() - clusters[b].mean();
        const double cost = na * nb / (na + nb) * d * d;
        if (cost < best_cost) {
          best_cost = cost;
          ba = a;
          bb = b;
        }
      }
    }
    Cluster& dst = clusters[ba];
    Cluster& src = clusters[bb];
    dst.members.insert(dst.members.end(), src.members.begin(), src.members.end());
    std::sort(dst.members.begin(), dst.members.end());
    dst.sum += src.sum;
    dst.sum_sq += src.sum_sq;
    clusters.erase(clusters.begin() + static_cast<std::ptrdiff_t>(bb));
    ClusterResult level = snapshot();
    if (level.max_within_var < limit) best = std::move(level);
  }
  if (!(best.max_within_var < limit)) {
    // Only reachable when w^2 <= 0 after rounding; singletons always have zero variance.
    throw NumericalError("ward_categories: no dendrogram level satisfies the variance bound");
  }
  return best;
}

/// Number of interval categories A_I among the scale's scored intervals.
inline std::size_t complexity_cost(const Scale& scale, double w) {
  const auto set = scored_intervals(scale);
  if (set.empty()) throw ValidationError("complexity_cost: no intervals <= 1250 cents");
  return ward_categories(set.intervals, w).k;
}

inline std::size_t complexity_cost(const Scale& scale) { return complexity_cost(scale, default_complexity_w(scale.type())); }

/// Number of step categories A_S.
inline std::size_t step_categories(const Scale& scale, double w) { return ward_categories(scale.steps(), w).k; }

}  // namespace scalevo
