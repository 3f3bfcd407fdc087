#pragma once

#include <algorithm>
#include <cmath>
#include <span>
#include <string>
#include <vector>

#include "scalevo/error.hpp"
#include "scalevo/generator.hpp"
#include "scalevo/rng.hpp"
#include "scalevo/scale.hpp"
#include "scalevo/stats.hpp"

namespace scalevo {

struct BinSignificance {
  double bin_low = 0.0;
  double bin_high = 0.0;
  long count = 0;
  double empirical_freq = 0.0;
  double null_freq = 0.0;
  double p = 1.0;
  double p_adjusted = 1.0;
  bool significant = false;
  std::string direction;  // "frequent", "rare" or "neutral"
};

struct SignificanceResult {
  long total_intervals = 0;
  std::vector<BinSignificance> bins;

  std::size_t n_raw_significant(double alpha = 0.05) const {
    return static_cast<std::size_t>(std::count_if(bins.begin(), bins.end(), [&](const auto& b) { return b.p < alpha; }));
  }
  std::size_t n_significant() const {
    return static_cast<std::size_t>(std::count_if(bins.begin(), bins.end(), [](const auto& b) { return b.significant; }));
  }
};

/// Two-direction binomial tail: P(X >= k) when k/K exceeds p, P(X <= k) when it
/// falls short, and the larger tail on an exact tie.
inline double binomial_direction_p(long k, long trials, double p, std::string* direction = nullptr) {
  const double freq = static_cast<double>(k) / static_cast<double>(trials);
  if (freq > p) {
    if (direction) *direction = "frequent";
    return binomial_upper_tail(k, trials, p);
  }
  if (freq < p) {
    if (direction) *direction = "rare";
    return binomial_lower_tail(k, trials, p);
  }
  if (direction) *direction = "neutral";
  return std::max(binomial_upper_tail(k, trials, p), binomial_lower_tail(k, trials, p));
}

/// Per-bin binomial test of empirical interval counts against the pooled null
/// frequencies, with Benjamini-Hochberg correction across bins.
inline SignificanceResult interval_significance(std::span<const IntervalSet> empirical,
                                                std::span<const IntervalSet> null_sets, double bin = 20.0,
                                                double alpha = 0.05) {
  if (empirical.empty()) throw ValidationError("interval_significance: no empirical scales");
  if (null_sets.empty()) throw ValidationError("interval_significance: no null scales");
  if (!(bin > 0.0)) throw ValidationError("interval_significance: bin width must be positive");
  double top = 0.0;
  for (const auto& s : empirical) {
    for (double v : s.intervals) top = std::max(top, v);
  }
  for (const auto& s : null_sets) {
    for (double v : s.intervals) top = std::max(top, v);
  }
  const auto n_bins = static_cast<std::size_t>(std::floor(top / bin)) + 1;
  std::vector<long> k(n_bins, 0);
  std::vector<double> null_counts(n_bins, 0.0);
  long total = 0;
  double null_total = 0.0;
  for (const auto& s : empirical) {
    for (double v : s.intervals) {
      ++k[static_cast<std::size_t>(std::floor(v / bin))];
      ++total;
    }
  }
  for (const auto& s : null_sets) {
    for (double v : s.intervals) {
      null_counts[static_cast<std::size_t>(std::floor(v / bin))] += 1.0;
      null_total += 1.0;
    }
  }
  if (total == 0) throw ValidationError("interval_significance: empirical scales have no intervals");

  SignificanceResult out;
  out.total_intervals = total;
  std::vector<double> pvals(n_bins);
  for (std::size_t i = 0; i < n_bins; ++i) {
    BinSignificance b;
    b.bin_low = bin * static_cast<double>(i);
    b.bin_high = b.bin_low + bin;
    b.count = k[i];
    b.empirical_freq = static_cast<double>(k[i]) / static_cast<double>(total);
    b.null_freq = null_total > 0.0 ? null_counts[i] / null_total : 0.0;
    b.p = binomial_direction_p(k[i], total, b.null_freq, &b.direction);
    pvals[i] = b.p;
    out.bins.push_back(std::move(b));
  }
  const auto bh = benjamini_hochberg(pvals, alpha);
  for (std::size_t i = 0; i < n_bins; ++i) {
    out.bins[i].p_adjusted = bh.adjusted[i];
    out.bins[i].significant = bh.rejected[i];
  }
  return out;
}

/// Interval sets of `n_populations` Melody populations, each matched scale by scale
/// to the empirical N_I and octave composition.
inline std::vector<IntervalSet> melody_null_sets(std::span<const Scale> empirical, const StepSource& source,
                                                 std::size_t n_populations, Rng& rng) {
  std::vector<IntervalSet> out;
  out.reserve(empirical.size() * n_populations);
  for (std::size_t p = 0; p < n_populations; ++p) {
    for (const auto& s : empirical) {
      out.push_back(interval_set(sample_melody_scale(s.n_steps(), source, s.octave(), rng)));
    }
  }
  return out;
}

inline std::vector<IntervalSet> interval_sets(std::span<const Scale> scales) {
  std::vector<IntervalSet> out;
  out.reserve(scales.size());
  for (const auto& s : scales) out.push_back(interval_set(s));
  return out;
}

}  // namespace scalevo
