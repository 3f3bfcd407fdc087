#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <span>
#include <vector>

#include <boost/math/distributions/binomial.hpp>

#include "scalevo/error.hpp"

namespace scalevo {

inline constexpr double kLn2 = 0.69314718055994530942;

/// CDF of N(0, sigma^2) at x.
inline double normal_cdf(double x, double sigma = 1.0) {
  return 0.5 * std::erfc(-x / (sigma * std::sqrt(2.0)));
}

inline double population_mean(std::span<const double> xs) {
  if (xs.empty()) return std::numeric_limits<double>::quiet_NaN();
  return std::accumulate(xs.begin(), xs.end(), 0.0) / static_cast<double>(xs.size());
}

inline double population_variance(std::span<const double> xs) {
  const double m = population_mean(xs);
  double acc = 0.0;
  for (double x : xs) acc += (x - m) * (x - m);
  return acc / static_cast<double>(xs.size());
}

inline double population_std(std::span<const double> xs) { return std::sqrt(population_variance(xs)); }

/// Normalises a non-negative vector to unit sum. Throws if the sum is not positive.
inline std::vector<double> normalized(std::span<const double> w) {
  double total = 0.0;
  for (double x : w) {
    if (!(x >= 0.0) || !std::isfinite(x)) throw ValidationError("weights must be finite and non-negative");
    total += x;
  }
  if (!(total > 0.0)) throw ValidationError("weights must have a positive sum");
  std::vector<double> out(w.begin(), w.end());
  for (double& x : out) x /= total;
  return out;
}

/// Jensen-Shannon divergence (natural log) between two histograms on the same bins.
/// Inputs are normalised first; the result lies in [0, ln 2].
inline double jensen_shannon(std::span<const double> p, std::span<const double> q) {
  if (p.size() != q.size()) throw ValidationError("jensen_shannon: histograms differ in length");
  const auto pn = normalized(p);
  const auto qn = normalized(q);
  double js = 0.0;
  for (std::size_t i = 0; i < pn.size(); ++i) {
    const double m = 0.5 * (pn[i] + qn[i]);
    if (pn[i] > 0.0) js += 0.5 * pn[i] * std::log(pn[i] / m);
    if (qn[i] > 0.0) js += 0.5 * qn[i] * std::log(qn[i] / m);
  }
  return std::clamp(js, 0.0, kLn2);
}

struct LogMeanExp {
  double value = 0.0;
  double std_error = 0.0;  // delta-method standard error of value
};

/// log(mean(exp(x))) with max subtraction; -inf entries are allowed.
inline LogMeanExp log_mean_exp(std::span<const double> xs) {
  if (xs.empty()) throw ValidationError("log_mean_exp: empty input");
  const double m = *std::max_element(xs.begin(), xs.end());
  if (!std::isfinite(m)) {
    if (m < 0) throw NumericalError("log_mean_exp: every term is -inf");
    throw NumericalError("log_mean_exp: non-finite term");
  }
  const double n = static_cast<double>(xs.size());
  double s = 0.0, s2 = 0.0;
  for (double x : xs) {
    const double e = std::exp(x - m);
    s += e;
    s2 += e * e;
  }
  const double mean = s / n;
  const double var = std::max(0.0, s2 / n - mean * mean);
  LogMeanExp out;
  out.value = m + std::log(mean);
  out.std_error = xs.size() > 1 ? std::sqrt(var * n / (n - 1.0) / n) / mean : 0.0;
  return out;
}

inline double weighted_mean(std::span<const double> xs, std::span<const double> w) {
  if (xs.size() != w.size()) throw ValidationError("weighted_mean: length mismatch");
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (!(w[i] >= 0.0)) throw ValidationError("weighted_mean: negative weight");
    num += w[i] * xs[i];
    den += w[i];
  }
  if (!(den > 0.0)) throw ValidationError("weighted_mean: total weight is zero");
  return num / den;
}

/// Kish effective sample size (sum w)^2 / sum w^2.
inline double kish_effective_size(std::span<const double> w) {
  double s = 0.0, s2 = 0.0;
  for (double x : w) {
    s += x;
    s2 += x * x;
  }
  return s2 > 0.0 ? s * s / s2 : 0.0;
}

/// P(X >= k) for X ~ Binomial(trials, p).
inline double binomial_upper_tail(long k, long trials, double p) {
  if (k <= 0) return 1.0;
  if (k > trials) return 0.0;
  if (p <= 0.0) return 0.0;
  if (p >= 1.0) return 1.0;
  boost::math::binomial_distribution<double> dist(static_cast<double>(trials), p);
  return boost::math::cdf(boost::math::complement(dist, static_cast<double>(k - 1)));
}

/// P(X <= k) for X ~ Binomial(trials, p).
inline double binomial_lower_tail(long k, long trials, double p) {
  if (k < 0) return 0.0;
  if (k >= trials) return 1.0;
  if (p <= 0.0) return 1.0;
  if (p >= 1.0) return 0.0;
  boost::math::binomial_distribution<double> dist(static_cast<double>(trials), p);
  return boost::math::cdf(dist, static_cast<double>(k));
}

struct BhResult {
  std::vector<bool> rejected;
  std::vector<double> adjusted;  // step-up adjusted p-values (q-values)
};

/// Benjamini-Hochberg step-up procedure at level alpha.
inline BhResult benjamini_hochberg(std::span<const double> pvalues, double alpha = 0.05) {
  const std::size_t m = pvalues.size();
  BhResult out{std::vector<bool>(m, false), std::vector<double>(m, 1.0)};
  if (m == 0) return out;
  std::vector<std::size_t> order(m);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return pvalues[a] < pvalues[b]; });
  std::size_t cutoff = 0;  // number rejected
  for (std::size_t r = 0; r < m; ++r) {
    if (pvalues[order[r]] <= alpha * static_cast<double>(r + 1) / static_cast<double>(m)) cutoff = r + 1;
  }
  for (std::size_t r = 0; r < cutoff; ++r) out.rejected[order[r]] = true;
  double running = 1.0;
  for (std::size_t r = m; r-- > 0;) {
    const double q = pvalues[order[r]] * static_cast<double>(m) / static_cast<double>(r + 1);
    running = std::min(running, q);
    out.adjusted[order[r]] = std::min(1.0, running);
  }
  return out;
}

/// n log-spaced points on [lo, hi] (inclusive).
inline std::vector<double> log_grid(double lo, double hi, std::size_t n) {
  if (!(lo > 0.0) || !(hi >= lo) || n == 0) throw ValidationError("log_grid: need 0 < lo <= hi and n >= 1");
  std::vector<double> g(n);
  if (n == 1) {
    g[0] = lo;
    return g;
  }
  const double a = std::log10(lo), b = std::log10(hi);
  for (std::size_t i = 0; i < n; ++i) {
    g[i] = std::pow(10.0, a + (b - a) * static_cast<double>(i) / static_cast<double>(n - 1));
  }
  return g;
}

}  // namespace scalevo
