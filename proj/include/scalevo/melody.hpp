#pragma once

#include <array>
#include <cmath>
#include <limits>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "scalevo/error.hpp"
#include "scalevo/scale.hpp"
#include "scalevo/stats.hpp"
#include "scalevo/step_distribution.hpp"

namespace scalevo {

/// Parameters of the Melody model: Interval Spacing (sigma_is, length) times
/// Motor Constraint (i0). All in cents except length.
struct MelodyParams {
  double sigma_is = 31.0;
  int length = 14;
  double i0 = 210.0;

  void validate() const {
    if (!(sigma_is > 0.0)) throw ValidationError("MelodyParams: sigma_is must be positive");
    if (length < 1) throw ValidationError("MelodyParams: length must be >= 1");
    if (!(i0 > 0.0)) throw ValidationError("MelodyParams: i0 must be positive");
  }
};

namespace melody_presets {
/// Fit constrained by melodic corpora (I0 = 2.1 st, sigma = 31 cents, L = 14).
inline constexpr MelodyParams kConstrained{31.0, 14, 210.0};
/// Values printed in the methods text (sigma = 61 cents, <I0> = 2.22 st).
inline constexpr MelodyParams kMethodsText{61.0, 14, 222.0};
/// Unconstrained three-parameter fit (I0 = 0.7 st, sigma = 53 cents, L = 15).
inline constexpr MelodyParams kUnconstrained{53.0, 15, 70.0};
}  // namespace melody_presets

/// Combined production + perception standard deviation.
inline double sigma_is_from_components(double sigma_per, double sigma_prod) {
  return std::sqrt(sigma_per * sigma_per + sigma_prod * sigma_prod);
}

/// Probability that an interval of size I survives L transmissions: Phi_{0,sigma}(I/2)^L.
inline double p_is(double interval, double sigma_is, int length) {
  if (interval < 0.0) throw ValidationError("p_is: interval must be non-negative");
  return std::pow(normal_cdf(interval / 2.0, sigma_is), length);
}

inline double p_mc(double interval, double i0) {
  if (interval < 0.0) throw ValidationError("p_mc: interval must be non-negative");
  return std::exp(-interval / i0);
}

/// Unnormalised Melody likelihood of a step.
inline double p_melody(double interval, const MelodyParams& params) {
  return p_is(interval, params.sigma_is, params.length) * p_mc(interval, params.i0);
}

/// p_melody evaluated at bin midpoints and normalised.
inline StepDistribution melody_distribution(const MelodyParams& params,
                                            std::vector<double> edges = default_step_edges()) {
  params.validate();
  std::vector<double> w(edges.size() - 1);
  for (std::size_t i = 0; i < w.size(); ++i) w[i] = p_melody(0.5 * (edges[i] + edges[i + 1]), params);
  return StepDistribution::from_weights(std::move(edges), w);
}

/// Melodic-interval histogram over semitone bins 0..14.
struct CorpusHistogram {
  static constexpr std::size_t kBins = 15;
  std::string name;
  std::array<double, kBins> counts{};

  void validate() const {
    double total = 0.0;
    for (double c : counts) {
      if (!(c >= 0.0) || !std::isfinite(c)) throw ValidationError("corpus '" + name + "' has a negative count");
      total += c;
    }
    if (!(total > 0.0)) throw ValidationError("corpus '" + name + "' has no positive count");
  }
};

/// Exponential MLE over bin midpoints (bin b has midpoint b + 0.5 semitones).
/// Returns I0 in cents.
inline double fit_mc(const CorpusHistogram& hist) {
  hist.validate();
  double num = 0.0, den = 0.0;
  for (std::size_t b = 0; b < CorpusHistogram::kBins; ++b) {
    const double mid = static_cast<double>(b) + 0.5;
    num += hist.counts[b] * mid;
    den += hist.counts[b];
  }
  return 100.0 * num / den;
}

struct IsFit {
  double sigma_is = 0.0;
  int length = 0;
  double jsd = 0.0;
  bool degenerate = false;  // empirical distribution had a single occupied bin
};

struct IsFitGrid {
  double sigma_min = 10.0;
  double sigma_max = 120.0;
  double sigma_step = 1.0;
  int length_min = 1;
  int length_max = 50;
};

/// Grid search of (sigma_is, L) minimising the JSD between the normalised Melody
/// curve at bin midpoints and the empirical distribution, with I0 held fixed.
inline IsFit fit_is(const StepDistribution& empirical, double i0, const IsFitGrid& grid = {}) {
  if (!(i0 > 0.0)) throw ValidationError("fit_is: i0 must be positive");
  const auto& probs = empirical.probabilities();
  const std::size_t nb = probs.size();
  std::size_t occupied = 0;
  for (double p : probs) occupied += p > 0.0 ? 1 : 0;

  std::vector<double> mids(nb), log_mc(nb), log_phi(nb), model(nb);
  for (std::size_t i = 0; i < nb; ++i) {
    mids[i] = empirical.bin_mid(i);
    log_mc[i] = -mids[i] / i0;
  }
  IsFit best;
  best.jsd = std::numeric_limits<double>::infinity();
  best.degenerate = occupied <= 1;
  const int n_sigma = static_cast<int>(std::floor((grid.sigma_max - grid.sigma_min) / grid.sigma_step + 1e-9)) + 1;
  for (int si = 0; si < n_sigma; ++si) {
    const double sigma = grid.sigma_min + grid.sigma_step * si;
    for (std::size_t i = 0; i < nb; ++i) log_phi[i] = std::log(normal_cdf(mids[i] / 2.0, sigma));
    for (int len = grid.length_min; len <= grid.length_max; ++len) {
      double mx = -std::numeric_limits<double>::infinity();
      for (std::size_t i = 0; i < nb; ++i) {
        model[i] = len * log_phi[i] + log_mc[i];
        mx = std::max(mx, model[i]);
      }
      for (std::size_t i = 0; i < nb; ++i) model[i] = std::exp(model[i] - mx);
      const double js = jensen_shannon(model, probs);
      if (js < best.jsd) {
        best.jsd = js;
        best.sigma_is = sigma;
        best.length = len;
      }
    }
  }
  return best;
}

struct AccuracyPoint {
  double delta_cents = 0.0;
  double accuracy = 0.5;
};

/// Least-squares fit of sigma in Acc = Phi_{0,sigma}(dI/2). Points with accuracy
/// <= 0.5 at a positive difference carry no information and get zero weight.
inline double fit_sigma_per(std::span<const AccuracyPoint> points) {
  std::vector<AccuracyPoint> used;
  for (const auto& p : points) {
    if (!(p.delta_cents >= 0.0) || !(p.accuracy >= 0.0 && p.accuracy <= 1.0)) {
      throw ValidationError("fit_sigma_per: need dI >= 0 and accuracy in [0, 1]");
    }
    if (p.delta_cents > 0.0 && p.accuracy > 0.5) used.push_back(p);
  }
  if (used.empty()) throw ValidationError("fit_sigma_per: no informative points (accuracy > 0.5 at dI > 0)");

  auto sse = [&](double log_sigma) {
    const double sigma = std::exp(log_sigma);
    double acc = 0.0;
    for (const auto& p : used) {
      const double r = normal_cdf(p.delta_cents / 2.0, sigma) - p.accuracy;
      acc += r * r;
    }
    return acc;
  };
  // Coarse log-spaced scan over [0.1, 1e5] cents, then golden-section refinement.
  const double lo = std::log(0.1), hi = std::log(1e5);
  const int n = 4000;
  int best_i = 0;
  double best_v = std::numeric_limits<double>::infinity();
  for (int i = 0; i <= n; ++i) {
    const double v = sse(lo + (hi - lo) * i / n);
    if (v < best_v) {
      best_v = v;
      best_i = i;
    }
  }
  double a = lo + (hi - lo) * std::max(0, best_i - 1) / n;
  double b = lo + (hi - lo) * std::min(n, best_i + 1) / n;
  const double phi = 0.5 * (std::sqrt(5.0) - 1.0);
  double c = b - phi * (b - a), d = a + phi * (b - a);
  double fc = sse(c), fd = sse(d);
  for (int it = 0; it < 200 && b - a > 1e-12; ++it) {
    if (fc < fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - phi * (b - a);
      fc = sse(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + phi * (b - a);
      fd = sse(d);
    }
  }
  return std::exp(0.5 * (a + b));
}

struct ScaleLogProbability {
  double value = 0.0;
  bool out_of_support = false;
};

/// log P_I(S) = sum of log bin probabilities of the steps.
inline ScaleLogProbability melody_scale_probability(std::span<const double> steps, const StepDistribution& dist) {
  ScaleLogProbability out;
  for (double s : steps) {
    const double p = dist.probability_of(s);
    if (p <= 0.0) {
      out.value = -std::numeric_limits<double>::infinity();
      out.out_of_support = true;
      return out;
    }
    out.value += std::log(p);
  }
  return out;
}

inline ScaleLogProbability melody_scale_probability(const Scale& scale, const StepDistribution& dist) {
  return melody_scale_probability(scale.steps(), dist);
}

}  // namespace scalevo
