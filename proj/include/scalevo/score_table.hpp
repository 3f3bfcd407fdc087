#pragma once

#include <cmath>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "scalevo/error.hpp"
#include "scalevo/scale.hpp"

namespace scalevo {

/// Raw interval scores on the 1-cent grid [0, 1250] and their z-scores over that
/// grid. Lookups round to the nearest grid point.
class NormalizedScoreTable {
 public:
  static constexpr int kMaxCents = 1250;
  static constexpr std::size_t kSize = kMaxCents + 1;

  static NormalizedScoreTable from_raw(std::string name, std::vector<double> raw) {
    if (raw.size() != kSize) throw ValidationError("score table needs 1251 raw values");
    double mean = 0.0;
    for (double v : raw) {
      if (!std::isfinite(v)) throw NumericalError("score table '" + name + "' has a non-finite raw score");
      mean += v;
    }
    mean /= static_cast<double>(kSize);
    double var = 0.0;
    for (double v : raw) var += (v - mean) * (v - mean);
    const double sd = std::sqrt(var / static_cast<double>(kSize));
    if (!(sd > 1e-12 * std::max(1.0, std::abs(mean)))) {
      throw NumericalError("score table '" + name + "' is constant; cannot z-normalise");
    }
    std::vector<double> z(kSize);
    for (std::size_t i = 0; i < kSize; ++i) z[i] = (raw[i] - mean) / sd;
    return NormalizedScoreTable(std::move(name), std::move(raw), std::move(z));
  }

  template <class Fn>
  static NormalizedScoreTable from_function(std::string name, Fn&& score) {
    std::vector<double> raw(kSize);
    for (std::size_t i = 0; i < kSize; ++i) raw[i] = score(static_cast<double>(i));
    return from_raw(std::move(name), std::move(raw));
  }

  const std::string& name() const { return name_; }
  std::span<const double> raw() const { return raw_; }
  std::span<const double> z() const { return z_; }

  static std::size_t grid_index(double cents) {
    if (!(cents >= -0.5) || cents >= kMaxCents + 0.5) {
      throw ValidationError("interval " + std::to_string(cents) + " lies outside the score grid [0, 1250]");
    }
    return static_cast<std::size_t>(std::floor(cents + 0.5));
  }

  double z_at(double cents) const { return z_[grid_index(cents)]; }
  double raw_at(double cents) const { return raw_[grid_index(cents)]; }

  /// Mean z-score over a (filtered) interval set.
  double mean_z(const IntervalSet& set) const {
    if (set.empty()) throw ValidationError("no intervals <= 1250 cents to score");
    double acc = 0.0;
    for (double v : set.intervals) acc += z_at(v);
    return acc / static_cast<double>(set.size());
  }

 private:
  NormalizedScoreTable(std::string name, std::vector<double> raw, std::vector<double> z)
      : name_(std::move(name)), raw_(std::move(raw)), z_(std::move(z)) {}

  std::string name_;
  std::vector<double> raw_;
  std::vector<double> z_;
};

}  // namespace scalevo
