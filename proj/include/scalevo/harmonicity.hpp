#pragma once

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>
#include <vector>

#include "scalevo/error.hpp"
#include "scalevo/scale.hpp"
#include "scalevo/score_table.hpp"

namespace scalevo {

enum class HarmonicityKind { OF, GP, HP };

struct HarmonicityModel {
  HarmonicityKind kind = HarmonicityKind::OF;
  double w = 20.0;           // OF kernel width / GP tolerance window (cents)
  int n = 10;                // HP partial count
  double rho = 1.0;          // HP roll-off exponent
  int gp_max_denominator = 24;

  void validate() const {
    if ((kind == HarmonicityKind::OF || kind == HarmonicityKind::GP) && !(w >= 1.0 && w <= 100.0)) {
      throw ValidationError("harmonicity window w must lie in [1, 100] cents");
    }
    if (kind == HarmonicityKind::HP && n < 1) throw ValidationError("HP model needs n >= 1");
    if (kind == HarmonicityKind::HP && !(rho >= 0.0)) throw ValidationError("HP model needs rho >= 0");
    if (kind == HarmonicityKind::GP && gp_max_denominator < 1) throw ValidationError("GP needs max denominator >= 1");
  }

  std::string name() const {
    switch (kind) {
      case HarmonicityKind::OF: return "OF(w=" + std::to_string(w) + ")";
      case HarmonicityKind::GP: return "GP(w=" + std::to_string(w) + ")";
      case HarmonicityKind::HP: return "HP(n=" + std::to_string(n) + ",rho=" + std::to_string(rho) + ")";
    }
    return "?";
  }
};

/// Octave-fifth model: unit-height Gaussian kernels at 1200 and 702 cents.
inline double h_of(double interval, double w) {
  const double a = interval - 1200.0, b = interval - 702.0;
  return std::exp(-a * a / (2.0 * w * w)) + std::exp(-b * b / (2.0 * w * w));
}

inline double ratio_cents(double x, double y) { return 1200.0 * std::log2(x / y); }

/// Gill-Purves score: best (x+y+1)/(xy) over reduced fractions x/y >= 1 with
/// y <= max_den lying within w cents of the interval; 0 if there is none.
inline double h_gp(double interval, double w, int max_den = 24) {
  if (interval < 0.0) throw ValidationError("h_gp: interval must be non-negative");
  double best = 0.0;
  for (int y = 1; y <= max_den; ++y) {
    const double lo = std::max(1.0, y * std::exp2((interval - w) / 1200.0));
    const double hi = y * std::exp2((interval + w) / 1200.0);
    const long x_lo = std::max<long>(y, static_cast<long>(std::floor(lo)) - 1);
    const long x_hi = static_cast<long>(std::ceil(hi)) + 1;
    for (long x = x_lo; x <= x_hi; ++x) {
      if (std::gcd(x, static_cast<long>(y)) != 1) continue;
      if (std::abs(ratio_cents(static_cast<double>(x), y) - interval) > w) continue;
      best = std::max(best, static_cast<double>(x + y + 1) / static_cast<double>(x * y));
    }
  }
  return best;
}

/// Harmonic template on a log-frequency axis: partial k at 1200 log2(k) cents with
/// amplitude k^-rho, each smeared by a Gaussian (std 7 cents). The score of an
/// interval is the best cosine similarity between the two-tone spectrum and a
/// single template rooted at any integer-cent fundamental.
class HarmonicTemplate {
 public:
  static constexpr double kSmear = 7.0;

  HarmonicTemplate(int n, double rho) : n_(n), rho_(rho) {
    if (n < 1) throw ValidationError("HarmonicTemplate: n must be >= 1");
    if (!(rho >= 0.0)) throw ValidationError("HarmonicTemplate: rho must be >= 0");
    for (int k = 1; k <= n; ++k) {
      positions_.push_back(1200.0 * std::log2(static_cast<double>(k)));
      amplitudes_.push_back(std::pow(static_cast<double>(k), -rho));
    }
    max_lag_ = static_cast<int>(std::ceil(positions_.back())) + kReach;
    acf_.assign(static_cast<std::size_t>(max_lag_) + 1, 0.0);
    for (int j = 0; j < n; ++j) {
      for (int k = 0; k < n; ++k) {
        const double amp = amplitudes_[j] * amplitudes_[k];
        if (amp == 0.0) continue;
        // Term is a Gaussian in the lag centred on p_k - p_j.
        const double centre = positions_[k] - positions_[j];
        const int from = std::max(0, static_cast<int>(std::floor(centre)) - kReach);
        const int to = std::min(max_lag_, static_cast<int>(std::ceil(centre)) + kReach);
        for (int lag = from; lag <= to; ++lag) acf_[lag] += amp * overlap(lag - centre);
      }
    }
  }

  /// Template autocorrelation at an arbitrary lag (cents).
  double autocorrelation(double lag) const {
    lag = std::abs(lag);
    const double r = std::round(lag);
    if (std::abs(lag - r) < 1e-12) {
      return r > max_lag_ ? 0.0 : acf_[static_cast<std::size_t>(r)];
    }
    if (lag > max_lag_ + 1) return 0.0;
    double acc = 0.0;
    for (int j = 0; j < n_; ++j) {
      for (int k = 0; k < n_; ++k) acc += amplitudes_[j] * amplitudes_[k] * overlap(lag - positions_[k] + positions_[j]);
    }
    return acc;
  }

  double score(double interval) const {
    if (interval < 0.0) throw ValidationError("h_hp: interval must be non-negative");
    const double a0 = acf_[0];
    const double norm = std::sqrt(a0) * std::sqrt(2.0 * a0 + 2.0 * autocorrelation(interval));
    const int f_lo = -max_lag_;
    const int f_hi = max_lag_ + static_cast<int>(std::ceil(interval));
    double best = 0.0;
    for (int f0 = f_lo; f0 <= f_hi; ++f0) {
      const double c = autocorrelation(f0) + autocorrelation(f0 - interval);
      best = std::max(best, c);
    }
    return best / norm;
  }

  int n() const { return n_; }
  double rho() const { return rho_; }

 private:
  static constexpr int kReach = 100;  // overlap(100) ~ e^-51

  // Overlap integral of two unit Gaussian bumps (std kSmear) separated by d, up
  // to the constant sqrt(pi) * kSmear which cancels in the cosine.
  static double overlap(double d) { return std::exp(-d * d / (4.0 * kSmear * kSmear)); }

  int n_;
  double rho_;
  int max_lag_ = 0;
  std::vector<double> positions_;
  std::vector<double> amplitudes_;
  std::vector<double> acf_;
};

inline double h_hp(double interval, int n, double rho) { return HarmonicTemplate(n, rho).score(interval); }

/// Raw scores of a model over the 1-cent grid, z-normalised.
inline NormalizedScoreTable normalize_scores(const HarmonicityModel& model) {
  model.validate();
  switch (model.kind) {
    case HarmonicityKind::OF:
      return NormalizedScoreTable::from_function(model.name(), [&](double c) { return h_of(c, model.w); });
    case HarmonicityKind::GP:
      return NormalizedScoreTable::from_function(
          model.name(), [&](double c) { return h_gp(c, model.w, model.gp_max_denominator); });
    case HarmonicityKind::HP: {
      const HarmonicTemplate tmpl(model.n, model.rho);
      return NormalizedScoreTable::from_function(model.name(), [&](double c) { return tmpl.score(c); });
    }
  }
  throw ValidationError("unknown harmonicity model");
}

/// C_M(S) = -<z(I)> over the scale's interval set (octave rules for octave scales,
/// intervals above 1250 cents dropped).
inline double harmony_cost(const Scale& scale, const NormalizedScoreTable& table) {
  return -table.mean_z(scored_intervals(scale));
}

}  // namespace scalevo
