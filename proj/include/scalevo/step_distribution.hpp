#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <span>
#include <vector>

#include "scalevo/error.hpp"
#include "scalevo/rng.hpp"
#include "scalevo/stats.hpp"

namespace scalevo {

/// Equal-width edges from lo to hi (the last bin may overhang hi).
inline std::vector<double> uniform_edges(double lo, double hi, double width) {
  if (!(width > 0.0) || !(hi > lo)) throw ValidationError("uniform_edges: need hi > lo and width > 0");
  std::vector<double> edges;
  const auto n = static_cast<std::size_t>(std::ceil((hi - lo) / width - 1e-9));
  for (std::size_t i = 0; i <= n; ++i) edges.push_back(lo + width * static_cast<double>(i));
  return edges;
}

/// 20-cent bins over [0, 1700].
inline std::vector<double> default_step_edges() { return uniform_edges(0.0, 1700.0, 20.0); }

/// Weighted histogram of values over the given edges. Values outside are dropped;
/// the last bin is closed on the right.
inline std::vector<double> histogram(std::span<const double> values, std::span<const double> weights,
                                     std::span<const double> edges) {
  if (edges.size() < 2) throw ValidationError("histogram: need at least two edges");
  if (!weights.empty() && weights.size() != values.size()) throw ValidationError("histogram: weight length mismatch");
  std::vector<double> h(edges.size() - 1, 0.0);
  for (std::size_t i = 0; i < values.size(); ++i) {
    const double v = values[i];
    if (v < edges.front() || v > edges.back()) continue;
    auto it = std::upper_bound(edges.begin(), edges.end(), v);
    std::size_t b = static_cast<std::size_t>(it - edges.begin());
    b = b == 0 ? 0 : b - 1;
    if (b >= h.size()) b = h.size() - 1;
    h[b] += weights.empty() ? 1.0 : weights[i];
  }
  return h;
}

/// A binned probability distribution over step sizes. Steps are uniform within a
/// bin; a zero-width bin is an atom at its edge.
class StepDistribution {
 public:
  StepDistribution(std::vector<double> edges, std::vector<double> probabilities)
      : edges_(std::move(edges)), probs_(std::move(probabilities)) {
    if (edges_.size() < 2) throw ValidationError("StepDistribution: need at least two edges");
    if (probs_.size() + 1 != edges_.size()) throw ValidationError("StepDistribution: need one probability per bin");
    for (std::size_t i = 1; i < edges_.size(); ++i) {
      if (edges_[i] < edges_[i - 1]) throw ValidationError("StepDistribution: edges must be ascending");
    }
    double total = 0.0;
    for (double p : probs_) {
      if (!(p >= 0.0) || !std::isfinite(p)) throw ValidationError("StepDistribution: negative probability");
      total += p;
    }
    if (std::abs(total - 1.0) > 1e-9) throw ValidationError("StepDistribution: probabilities must sum to 1");
    cdf_.resize(probs_.size());
    double acc = 0.0;
    for (std::size_t i = 0; i < probs_.size(); ++i) {
      acc += probs_[i];
      cdf_[i] = acc;
      if (edges_[i + 1] == edges_[i]) atoms_.push_back(i);
    }
  }

  static StepDistribution from_weights(std::vector<double> edges, std::span<const double> weights) {
    return StepDistribution(std::move(edges), normalized(weights));
  }

  static StepDistribution from_samples(std::span<const double> values, std::span<const double> weights,
                                       std::vector<double> edges) {
    auto h = histogram(values, weights, edges);
    return from_weights(std::move(edges), h);
  }

  /// Uniform on [lo, hi].
  static StepDistribution uniform(double lo, double hi) { return StepDistribution({lo, hi}, {1.0}); }

  /// All mass at one value.
  static StepDistribution point_mass(double at) { return StepDistribution({at, at}, {1.0}); }

  const std::vector<double>& edges() const { return edges_; }
  const std::vector<double>& probabilities() const { return probs_; }
  std::size_t n_bins() const { return probs_.size(); }
  double bin_low(std::size_t i) const { return edges_[i]; }
  double bin_high(std::size_t i) const { return edges_[i + 1]; }
  double bin_mid(std::size_t i) const { return 0.5 * (edges_[i] + edges_[i + 1]); }

  std::optional<std::size_t> bin_of(double x) const {
    for (std::size_t a : atoms_) {
      if (x == edges_[a]) return a;
    }
    if (x < edges_.front() || x > edges_.back()) return std::nullopt;
    if (x == edges_.back()) {
      std::size_t b = probs_.size() - 1;
      return b;
    }
    auto it = std::upper_bound(edges_.begin(), edges_.end(), x);
    return static_cast<std::size_t>(it - edges_.begin()) - 1;
  }

  /// Mass of the bin containing the step (0 outside the support).
  double probability_of(double step) const {
    auto b = bin_of(step);
    return b ? probs_[*b] : 0.0;
  }

  double log_probability_of(double step) const {
    const double p = probability_of(step);
    return p > 0.0 ? std::log(p) : -std::numeric_limits<double>::infinity();
  }

  /// Inverse-CDF draw of a bin, then uniform within it.
  double sample(Rng& rng) const {
    const double u = rng.uniform();
    auto it = std::upper_bound(cdf_.begin(), cdf_.end(), u * cdf_.back());
    std::size_t b = static_cast<std::size_t>(it - cdf_.begin());
    if (b >= probs_.size()) b = probs_.size() - 1;
    while (probs_[b] == 0.0 && b > 0) --b;
    const double lo = edges_[b], hi = edges_[b + 1];
    return lo == hi ? lo : rng.uniform(lo, hi);
  }

  double mean() const {
    double m = 0.0;
    for (std::size_t i = 0; i < probs_.size(); ++i) m += probs_[i] * bin_mid(i);
    return m;
  }

  /// Smallest value with non-zero density.
  double min_support() const {
    for (std::size_t i = 0; i < probs_.size(); ++i) {
      if (probs_[i] > 0.0) return edges_[i];
    }
    return edges_.front();
  }

  /// Same probabilities with every edge multiplied by factor.
  StepDistribution scaled(double factor) const {
    if (!(factor > 0.0)) throw ValidationError("StepDistribution::scaled: factor must be positive");
    auto e = edges_;
    for (double& x : e) x *= factor;
    return StepDistribution(std::move(e), probs_);
  }

 private:
  std::vector<double> edges_;
  std::vector<double> probs_;
  std::vector<double> cdf_;
  std::vector<std::size_t> atoms_;
};

/// Rescales a step distribution so that n_steps steps have an expected sum of one
/// octave (the distribution of I'_S used for octave scales).
inline StepDistribution octave_rescaled(const StepDistribution& dist, std::size_t n_steps) {
  return dist.scaled(1200.0 / (static_cast<double>(n_steps) * dist.mean()));
}

}  // namespace scalevo
