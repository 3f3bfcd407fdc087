#pragma once

#include <algorithm>
#include <cmath>
#include <numeric>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "scalevo/error.hpp"

namespace scalevo {

inline constexpr double kOctaveCents = 1200.0;
inline constexpr double kOctaveTolerance = 1e-6;
/// Intervals above 12.5 semitones are not scored by the harmonicity/interference models.
inline constexpr double kMaxScoredInterval = 1250.0;

enum class ScaleType { Vocal, Instrumental, Theory };

inline std::string_view to_string(ScaleType t) {
  switch (t) {
    case ScaleType::Vocal: return "Vocal";
    case ScaleType::Instrumental: return "Instrumental";
    case ScaleType::Theory: return "Theory";
  }
  return "Vocal";
}

inline ScaleType parse_scale_type(std::string_view s) {
  if (s == "Vocal" || s == "vocal") return ScaleType::Vocal;
  if (s == "Instrumental" || s == "instrumental") return ScaleType::Instrumental;
  if (s == "Theory" || s == "theory") return ScaleType::Theory;
  throw ValidationError("unknown scale type '" + std::string(s) + "'");
}

/// The eleven geographic regions used for weighting, plus "synthetic".
inline const std::vector<std::string>& default_regions() {
  static const std::vector<std::string> regions = {
      "Western",      "Middle East",   "South Asia",    "East Asia",
      "Southeast Asia", "Africa",      "Oceania",       "Central Asia",
      "North America", "South America", "Circumpolar",  "synthetic"};
  return regions;
}

inline bool is_known_region(std::string_view region,
                            std::span<const std::string> allowed = default_regions()) {
  return std::find(allowed.begin(), allowed.end(), region) != allowed.end();
}

/// An ordered list of steps (cents) plus metadata. Immutable after construction.
class Scale {
 public:
  Scale(std::vector<double> steps, ScaleType type, std::string region, bool octave, std::string id = {})
      : steps_(std::move(steps)), type_(type), region_(std::move(region)), octave_(octave), id_(std::move(id)) {
    if (steps_.empty()) throw ValidationError("scale '" + id_ + "' has no steps");
    double sum = 0.0;
    for (double s : steps_) {
      if (!(s > 0.0) || !std::isfinite(s)) {
        throw ValidationError("scale '" + id_ + "' has a non-positive step " + std::to_string(s));
      }
      sum += s;
    }
    if (octave_ && std::abs(sum - kOctaveCents) > kOctaveTolerance) {
      throw ValidationError("octave scale '" + id_ + "' sums to " + std::to_string(sum) + " cents, not 1200");
    }
    range_ = sum;
  }

  /// Octave flag defaults to true for Theory scales.
  explicit Scale(std::vector<double> steps, ScaleType type = ScaleType::Vocal, std::string region = "synthetic")
      : Scale(std::move(steps), type, std::move(region), type == ScaleType::Theory) {}

  const std::vector<double>& steps() const { return steps_; }
  std::size_t n_steps() const { return steps_.size(); }
  ScaleType type() const { return type_; }
  const std::string& region() const { return region_; }
  bool octave() const { return octave_; }
  const std::string& id() const { return id_; }
  /// Sum of the steps (R).
  double range() const { return range_; }

  Scale with_steps(std::vector<double> steps) const { return Scale(std::move(steps), type_, region_, octave_, id_); }
  Scale with_id(std::string id) const { return Scale(steps_, type_, region_, octave_, std::move(id)); }

 private:
  std::vector<double> steps_;
  ScaleType type_;
  std::string region_;
  bool octave_;
  std::string id_;
  double range_ = 0.0;
};

/// Degrees relative to the lowest: [0, s1, s1+s2, ...]; N_I + 1 entries.
struct DegreeList {
  std::vector<double> degrees;
};

inline DegreeList degrees_from_steps(std::span<const double> steps) {
  DegreeList out;
  out.degrees.reserve(steps.size() + 1);
  out.degrees.push_back(0.0);
  double acc = 0.0;
  for (double s : steps) {
    if (!(s > 0.0)) throw ValidationError("degrees_from_steps: non-positive step " + std::to_string(s));
    acc += s;
    out.degrees.push_back(acc);
  }
  return out;
}

enum class IntervalMode { NonOctave, Octave };

struct IntervalSet {
  std::vector<double> intervals;
  IntervalMode mode = IntervalMode::NonOctave;

  std::size_t size() const { return intervals.size(); }
  bool empty() const { return intervals.empty(); }
};

/// Non-octave: every ascending difference between two degrees.
/// Octave: for each ordered pair of distinct pitch classes, (d_j - d_i) mod 1200,
/// skipping multiples of the octave.
inline IntervalSet interval_set(std::span<const double> steps, IntervalMode mode) {
  const auto d = degrees_from_steps(steps).degrees;
  IntervalSet out;
  out.mode = mode;
  if (mode == IntervalMode::NonOctave) {
    out.intervals.reserve(d.size() * (d.size() - 1) / 2);
    for (std::size_t i = 0; i < d.size(); ++i) {
      for (std::size_t j = i + 1; j < d.size(); ++j) out.intervals.push_back(d[j] - d[i]);
    }
    return out;
  }
  const std::size_t n = d.size() - 1;  // pitch classes exclude the terminal octave
  out.intervals.reserve(n * (n - 1));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      if (i == j) continue;
      double v = std::fmod(d[j] - d[i], kOctaveCents);
      if (v < 0.0) v += kOctaveCents;
      if (v < kOctaveTolerance || kOctaveCents - v < kOctaveTolerance) continue;
      out.intervals.push_back(v);
    }
  }
  return out;
}

inline IntervalSet interval_set(const Scale& scale) {
  return interval_set(scale.steps(), scale.octave() ? IntervalMode::Octave : IntervalMode::NonOctave);
}

inline IntervalSet filter_intervals(const IntervalSet& set, double max_cents = kMaxScoredInterval) {
  if (!(max_cents > 0.0)) throw ValidationError("filter_intervals: max_cents must be positive");
  IntervalSet out;
  out.mode = set.mode;
  std::copy_if(set.intervals.begin(), set.intervals.end(), std::back_inserter(out.intervals),
               [max_cents](double v) { return v <= max_cents; });
  return out;
}

/// Interval set after the 1250-cent filter; the input to every interval-based cost.
inline IntervalSet scored_intervals(const Scale& scale) { return filter_intervals(interval_set(scale)); }

}  // namespace scalevo
