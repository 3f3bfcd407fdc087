#pragma once

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "scalevo/error.hpp"
#include "scalevo/scale.hpp"
#include "scalevo/score_table.hpp"

namespace scalevo {

inline constexpr double kDefaultRootHz = 261.6;

/// Harmonic partial amplitudes; partial k sits at k times the fundamental.
struct Timbre {
  std::vector<double> amplitudes;

  static Timbre harmonic(int n_partials = 10, double rolloff = 1.0) {
    if (n_partials < 1) throw ValidationError("Timbre: need at least one partial");
    if (!(rolloff >= 0.0)) throw ValidationError("Timbre: roll-off must be >= 0");
    Timbre t;
    for (int k = 1; k <= n_partials; ++k) t.amplitudes.push_back(std::pow(static_cast<double>(k), -rolloff));
    return t;
  }

  std::size_t n_partials() const { return amplitudes.size(); }

  void validate() const {
    if (amplitudes.empty()) throw ValidationError("Timbre: need at least one partial");
    for (double a : amplitudes) {
      if (!(a > 0.0) || !std::isfinite(a)) throw ValidationError("Timbre: amplitudes must be positive");
    }
  }
};

enum class InterferenceKind { HK, S, B };

struct InterferenceModel {
  InterferenceKind kind = InterferenceKind::HK;
  double r = 1.359;
  /// HK only: apply g(x) = (4x e^{1-4x})^2 to the bandwidth distance instead of using it raw.
  bool canonical_g = true;

  void validate() const {
    if (!(r > 0.0)) throw ValidationError("InterferenceModel: r must be positive");
  }

  std::string name() const {
    switch (kind) {
      case InterferenceKind::HK: return canonical_g ? "HK" : "HK(raw)";
      case InterferenceKind::S: return "S";
      case InterferenceKind::B: return "B";
    }
    return "?";
  }
};

namespace detail {
inline void check_freqs(double f1, double f2) {
  if (!(f1 > 0.0) || !(f2 > 0.0)) throw ValidationError("dissonance: frequencies must be positive");
}
}  // namespace detail

inline double dissonance_hk(double f1, double f2, const Timbre& timbre, double r = 1.359, bool canonical_g = true) {
  detail::check_freqs(f1, f2);
  const auto& a = timbre.amplitudes;
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    den += std::pow(a[i], r);
    const double fi = static_cast<double>(i + 1) * f1;
    for (std::size_t j = 0; j < a.size(); ++j) {
      const double fj = static_cast<double>(j + 1) * f2;
      const double wc = 1.72 * std::pow(0.5 * (fi + fj), 0.65);
      const double x = std::abs(fi - fj) / wc;
      const double g = canonical_g ? std::pow(4.0 * x * std::exp(1.0 - 4.0 * x), 2.0) : x;
      num += std::pow(a[i] * a[j], r / 2.0) * g;
    }
  }
  return num / den;
}

inline double dissonance_sethares(double f1, double f2, const Timbre& timbre) {
  detail::check_freqs(f1, f2);
  const auto& a = timbre.amplitudes;
  double acc = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double fi = static_cast<double>(i + 1) * f1;
    for (std::size_t j = 0; j < a.size(); ++j) {
      const double fj = static_cast<double>(j + 1) * f2;
      const double s = 0.24 / (0.021 * std::min(fi, fj) + 19.0);
      const double x = s * std::abs(fi - fj);
      acc += a[i] * a[j] * (std::exp(-3.5 * x) - std::exp(-5.75 * x));
    }
  }
  return acc;
}

inline double dissonance_berezovsky(double f1, double f2, const Timbre& timbre) {
  detail::check_freqs(f1, f2);
  const auto& a = timbre.amplitudes;
  double acc = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double fi = static_cast<double>(i + 1) * f1;
    for (std::size_t j = 0; j < a.size(); ++j) {
      const double fj = static_cast<double>(j + 1) * f2;
      const double dist = std::abs(std::log2(fi / fj));
      if (dist == 0.0) continue;
      const double wc = 0.67 * std::pow(std::min(fi, fj), -0.68);
      const double l = std::log(dist / wc);
      acc += std::pow(std::min(a[i], a[j]), 0.606) * std::exp(-l * l);
    }
  }
  return acc;
}

inline double dissonance(const InterferenceModel& model, double f1, double f2, const Timbre& timbre) {
  switch (model.kind) {
    case InterferenceKind::HK: return dissonance_hk(f1, f2, timbre, model.r, model.canonical_g);
    case InterferenceKind::S: return dissonance_sethares(f1, f2, timbre);
    case InterferenceKind::B: return dissonance_berezovsky(f1, f2, timbre);
  }
  throw ValidationError("unknown interference model");
}

/// Dissonance of root and root * 2^(I/1200) over the 1-cent grid, z-normalised.
inline NormalizedScoreTable dissonance_table(const InterferenceModel& model, const Timbre& timbre = Timbre::harmonic(),
                                             double root_hz = kDefaultRootHz) {
  model.validate();
  timbre.validate();
  if (!(root_hz > 0.0)) throw ValidationError("dissonance_table: root frequency must be positive");
  return NormalizedScoreTable::from_function(model.name(), [&](double cents) {
    return dissonance(model, root_hz, root_hz * std::exp2(cents / 1200.0), timbre);
  });
}

/// C(S) = <z(D(I))> over the scale's scored intervals; rougher means costlier.
inline double interference_cost(const Scale& scale, const NormalizedScoreTable& table) {
  return table.mean_z(scored_intervals(scale));
}

inline double interference_cost(const Scale& scale, const InterferenceModel& model,
                                const Timbre& timbre = Timbre::harmonic(), double root_hz = kDefaultRootHz) {
  return interference_cost(scale, dissonance_table(model, timbre, root_hz));
}

}  // namespace scalevo
