#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <span>
#include <string>
#include <vector>

#include "scalevo/error.hpp"
#include "scalevo/parallel.hpp"
#include "scalevo/rng.hpp"
#include "scalevo/scale.hpp"
#include "scalevo/stats.hpp"

namespace scalevo {

inline constexpr double kEquidistantStdThreshold = 20.0;

struct PitchTrack {
  std::vector<double> times;  // seconds, non-decreasing
  std::vector<double> cents;
  std::vector<bool> voiced;

  std::size_t size() const { return times.size(); }

  void validate() const {
    if (cents.size() != times.size() || voiced.size() != times.size()) {
      throw ValidationError("PitchTrack: times, cents and voiced must have equal length");
    }
    for (std::size_t i = 0; i < times.size(); ++i) {
      if (!std::isfinite(times[i])) throw ValidationError("PitchTrack: non-finite time at row " + std::to_string(i));
      if (i > 0 && times[i] < times[i - 1]) {
        throw ValidationError("PitchTrack: times decrease at row " + std::to_string(i));
      }
      if (voiced[i] && !std::isfinite(cents[i])) {
        throw ValidationError("PitchTrack: voiced sample without a finite pitch at row " + std::to_string(i));
      }
    }
  }
};

/// Duration of each sample: the gap to the next sample; the last sample reuses the
/// previous gap.
inline std::vector<double> sample_durations(const PitchTrack& track) {
  const std::size_t n = track.size();
  std::vector<double> d(n, 0.0);
  for (std::size_t i = 0; i + 1 < n; ++i) d[i] = track.times[i + 1] - track.times[i];
  if (n >= 2) d[n - 1] = d[n - 2];
  if (n == 1) d[0] = 1.0;
  return d;
}

struct PitchHistogram {
  double bin = 5.0;
  std::vector<double> edges;
  std::vector<double> mass;  // seconds of voiced pitch per bin
  std::size_t n_samples = 0;  // voiced samples

  double mid(std::size_t i) const { return 0.5 * (edges[i] + edges[i + 1]); }
  double total() const {
    double t = 0.0;
    for (double m : mass) t += m;
    return t;
  }
  std::size_t occupied() const {
    return static_cast<std::size_t>(std::count_if(mass.begin(), mass.end(), [](double m) { return m > 0.0; }));
  }
};

/// Duration-weighted histogram of voiced pitch. With fold_octave the pitch is
/// reduced mod 1200 first.
inline PitchHistogram pitch_histogram(const PitchTrack& track, double bin = 5.0, bool fold_octave = false) {
  track.validate();
  if (!(bin > 0.0)) throw ValidationError("pitch_histogram: bin must be positive");
  const auto dur = sample_durations(track);
  std::vector<double> values, weights;
  for (std::size_t i = 0; i < track.size(); ++i) {
    if (!track.voiced[i]) continue;
    double c = track.cents[i];
    if (fold_octave) {
      c = std::fmod(c, kOctaveCents);
      if (c < 0.0) c += kOctaveCents;
    }
    values.push_back(c);
    weights.push_back(dur[i]);
  }
  if (values.empty()) throw ValidationError("pitch_histogram: track has no voiced samples");
  const double lo = std::floor(*std::min_element(values.begin(), values.end()) / bin) * bin;
  const double hi = *std::max_element(values.begin(), values.end());
  const auto n_bins = static_cast<std::size_t>(std::floor((hi - lo) / bin)) + 1;
  PitchHistogram h;
  h.bin = bin;
  h.n_samples = values.size();
  for (std::size_t i = 0; i <= n_bins; ++i) h.edges.push_back(lo + bin * static_cast<double>(i));
  h.mass.assign(n_bins, 0.0);
  for (std::size_t i = 0; i < values.size(); ++i) {
    auto b = static_cast<std::size_t>(std::floor((values[i] - lo) / bin));
    h.mass[std::min(b, n_bins - 1)] += weights[i];
  }
  return h;
}

struct GmmFit {
  std::size_t k = 0;
  std::vector<double> means;  // ascending
  std::vector<double> stds;
  std::vector<double> weights;
  double log_likelihood = 0.0;  // mean per unit of histogram mass
  std::vector<double> ll_trace;
  std::size_t iterations = 0;
  bool converged = false;
  bool warning = false;  // no restart converged
};

namespace detail {

inline double log_normal_pdf(double x, double mean, double sd) {
  const double z = (x - mean) / sd;
  return -0.5 * z * z - std::log(sd) - 0.5 * std::log(2.0 * std::numbers::pi);
}

struct Points {
  std::vector<double> x;
  std::vector<double> w;  // normalised to sum 1
};

inline GmmFit em_run(const Points& pts, std::size_t k, double var_floor, Rng& rng, double tol, std::size_t max_iter) {
  const std::size_t n = pts.x.size();
  // K-means++ seeding over occupied bins, weighted by mass.
  std::vector<double> centres;
  auto draw = [&](const std::vector<double>& score) {
    double total = 0.0;
    for (double s : score) total += s;
    double u = rng.uniform() * total;
    for (std::size_t i = 0; i < n; ++i) {
      u -= score[i];
      if (u < 0.0) return i;
    }
    return n - 1;
  };
  centres.push_back(pts.x[draw(pts.w)]);
  std::vector<double> d2(n);
  while (centres.size() < k) {
    for (std::size_t i = 0; i < n; ++i) {
      double best = std::numeric_limits<double>::infinity();
      for (double c : centres) best = std::min(best, (pts.x[i] - c) * (pts.x[i] - c));
      d2[i] = pts.w[i] * best;
    }
    double total = 0.0;
    for (double v : d2) total += v;
    centres.push_back(total > 0.0 ? pts.x[draw(d2)] : pts.x[rng.index(n)]);
  }

  GmmFit fit;
  fit.k = k;
  fit.means = centres;
  fit.stds.assign(k, 0.0);
  fit.weights.assign(k, 0.0);
  {
    std::vector<double> s2(k, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
      std::size_t best = 0;
      for (std::size_t j = 1; j < k; ++j) {
        if (std::abs(pts.x[i] - centres[j]) < std::abs(pts.x[i] - centres[best])) best = j;
      }
      fit.weights[best] += pts.w[i];
      s2[best] += pts.w[i] * (pts.x[i] - centres[best]) * (pts.x[i] - centres[best]);
    }
    for (std::size_t j = 0; j < k; ++j) {
      const double var = fit.weights[j] > 0.0 ? s2[j] / fit.weights[j] : var_floor;
      fit.stds[j] = std::sqrt(std::max(var, var_floor));
      fit.weights[j] = std::max(fit.weights[j], 1e-12);
    }
    double t = 0.0;
    for (double v : fit.weights) t += v;
    for (double& v : fit.weights) v /= t;
  }

  std::vector<double> resp(n * k);
  double prev = -std::numeric_limits<double>::infinity();
  for (std::size_t it = 0; it < max_iter; ++it) {
    // E step; the log-likelihood is that of the parameters entering this step.
    double ll = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      double mx = -std::numeric_limits<double>::infinity();
      for (std::size_t j = 0; j < k; ++j) {
        const double v = std::log(fit.weights[j]) + log_normal_pdf(pts.x[i], fit.means[j], fit.stds[j]);
        resp[i * k + j] = v;
        mx = std::max(mx, v);
      }
      double s = 0.0;
      for (std::size_t j = 0; j < k; ++j) s += std::exp(resp[i * k + j] - mx);
      const double lse = mx + std::log(s);
      for (std::size_t j = 0; j < k; ++j) resp[i * k + j] = std::exp(resp[i * k + j] - lse);
      ll += pts.w[i] * lse;
    }
    fit.ll_trace.push_back(ll);
    fit.log_likelihood = ll;
    fit.iterations = it + 1;
    if (ll - prev < tol) {
      fit.converged = true;
      break;
    }
    prev = ll;
    // M step.
    for (std::size_t j = 0; j < k; ++j) {
      double nk = 0.0, s = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        nk += pts.w[i] * resp[i * k + j];
        s += pts.w[i] * resp[i * k + j] * pts.x[i];
      }
      fit.weights[j] = nk;
      if (nk <= 1e-300) continue;
      const double mean = s / nk;
      double v = 0.0;
      for (std::size_t i = 0; i < n; ++i) v += pts.w[i] * resp[i * k + j] * (pts.x[i] - mean) * (pts.x[i] - mean);
      fit.means[j] = mean;
      fit.stds[j] = std::sqrt(std::max(v / nk, var_floor));
    }
  }
  // Sort components by mean.
  std::vector<std::size_t> order(k);
  for (std::size_t j = 0; j < k; ++j) order[j] = j;
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return fit.means[a] < fit.means[b]; });
  GmmFit sorted = fit;
  for (std::size_t j = 0; j < k; ++j) {
    sorted.means[j] = fit.means[order[j]];
    sorted.stds[j] = fit.stds[order[j]];
    sorted.weights[j] = fit.weights[order[j]];
  }
  return sorted;
}

}  // namespace detail

struct GmmOptions {
  std::size_t restarts = 10;
  double tolerance = 1e-6;
  std::size_t max_iterations = 500;
};

/// Weighted EM over bin midpoints with bin masses as weights; best of several
/// K-means++-seeded restarts (highest log-likelihood, ties to the lower restart).
inline GmmFit fit_gmm(const PitchHistogram& hist, std::size_t k, std::uint64_t seed, const GmmOptions& opt = {}) {
  if (k < 1) throw ValidationError("fit_gmm: K must be >= 1");
  if (opt.restarts < 1) throw ValidationError("fit_gmm: need at least one restart");
  detail::Points pts;
  const double total = hist.total();
  for (std::size_t i = 0; i < hist.mass.size(); ++i) {
    if (hist.mass[i] > 0.0) {
      pts.x.push_back(hist.mid(i));
      pts.w.push_back(hist.mass[i] / total);
    }
  }
  if (pts.x.size() < k) {
    throw ValidationError("fit_gmm: histogram has " + std::to_string(pts.x.size()) + " occupied bins, fewer than K = " +
                          std::to_string(k));
  }
  const double var_floor = hist.bin * hist.bin / 12.0;
  auto fits = parallel_map(opt.restarts, [&](std::size_t r) {
    Rng rng(derive_seed(seed, r));
    return detail::em_run(pts, k, var_floor, rng, opt.tolerance, opt.max_iterations);
  });
  std::size_t best = 0;
  bool any_converged = false;
  for (std::size_t r = 0; r < fits.size(); ++r) {
    any_converged = any_converged || fits[r].converged;
    if (fits[r].log_likelihood > fits[best].log_likelihood) best = r;
  }
  GmmFit out = std::move(fits[best]);
  out.warning = !any_converged;
  return out;
}

/// BIC with n = number of voiced samples and 3K - 1 free parameters.
inline double gmm_bic(const GmmFit& fit, std::size_t n_samples) {
  const double n = static_cast<double>(n_samples);
  return -2.0 * n * fit.log_likelihood + (3.0 * static_cast<double>(fit.k) - 1.0) * std::log(n);
}

struct GmmAutoResult {
  GmmFit fit;
  std::vector<std::size_t> ks;
  std::vector<double> bics;
};

/// Fits every K in [k_min, k_max] and keeps the lowest BIC (ties to the smaller K).
inline GmmAutoResult fit_gmm_auto(const PitchHistogram& hist, std::size_t k_min, std::size_t k_max, std::uint64_t seed,
                                  const GmmOptions& opt = {}) {
  if (k_min < 1 || k_max < k_min) throw ValidationError("fit_gmm_auto: need 1 <= k_min <= k_max");
  GmmAutoResult out;
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t k = k_min; k <= std::min(k_max, hist.occupied()); ++k) {
    GmmFit f = fit_gmm(hist, k, seed, opt);
    const double bic = gmm_bic(f, hist.n_samples);
    out.ks.push_back(k);
    out.bics.push_back(bic);
    if (bic < best) {
      best = bic;
      out.fit = std::move(f);
    }
  }
  if (out.ks.empty()) throw ValidationError("fit_gmm_auto: histogram has fewer occupied bins than k_min");
  return out;
}

struct ExtractedScale {
  Scale scale;
  bool warning = false;  // two degrees closer than 10 cents
  std::string message;
};

/// Sorted GMM means as degrees relative to the lowest; steps are their differences.
inline ExtractedScale scale_from_gmm(const GmmFit& fit, ScaleType type = ScaleType::Vocal,
                                     std::string region = "synthetic", std::string id = {}) {
  if (fit.means.size() < 2) throw ValidationError("scale_from_gmm: need at least two components to form a step");
  auto means = fit.means;
  std::sort(means.begin(), means.end());
  std::vector<double> steps;
  bool warn = false;
  for (std::size_t i = 1; i < means.size(); ++i) {
    const double s = means[i] - means[i - 1];
    warn = warn || s < 10.0;
    steps.push_back(s);
  }
  if (std::any_of(steps.begin(), steps.end(), [](double s) { return !(s > 0.0); })) {
    throw ValidationError("scale_from_gmm: two components share a mean");
  }
  ExtractedScale out{Scale(std::move(steps), type, std::move(region), false, std::move(id)), warn, {}};
  if (warn) out.message = "two fitted degrees lie less than 10 cents apart; K is probably too large";
  return out;
}

inline double step_std(const Scale& scale) { return population_std(scale.steps()); }

/// Equidistant when the population std of the steps is below 20 cents.
inline bool detect_equidistant(const Scale& scale) {
  if (scale.n_steps() < 2) throw ValidationError("detect_equidistant: need at least two steps");
  return step_std(scale) < kEquidistantStdThreshold;
}

/// A sung-melody stand-in: each note holds one degree for note_seconds with
/// Gaussian pitch jitter, cycling through the degrees in order.
inline PitchTrack synthetic_pitch_track(std::span<const double> degrees, double jitter_cents, std::size_t n_notes,
                                        double note_seconds, double dt, Rng& rng) {
  if (degrees.empty()) throw ValidationError("synthetic_pitch_track: no degrees");
  if (!(dt > 0.0) || !(note_seconds >= dt)) throw ValidationError("synthetic_pitch_track: need 0 < dt <= note length");
  PitchTrack t;
  double time = 0.0;
  const auto per_note = static_cast<std::size_t>(std::llround(note_seconds / dt));
  for (std::size_t note = 0; note < n_notes; ++note) {
    const double centre = degrees[note % degrees.size()];
    for (std::size_t i = 0; i < per_note; ++i) {
      t.times.push_back(time);
      t.cents.push_back(rng.normal(centre, jitter_cents));
      t.voiced.push_back(true);
      time += dt;
    }
    // A short unvoiced gap between notes.
    t.times.push_back(time);
    t.cents.push_back(0.0);
    t.voiced.push_back(false);
    time += dt;
  }
  return t;
}

}  // namespace scalevo
