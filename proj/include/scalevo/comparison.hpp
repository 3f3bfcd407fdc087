#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "scalevo/cost_model.hpp"
#include "scalevo/error.hpp"
#include "scalevo/generator.hpp"
#include "scalevo/rng.hpp"
#include "scalevo/scale.hpp"
#include "scalevo/stats.hpp"

namespace scalevo {

/// Costs of Melody-sampled scales for one (cost model, N_I, octave) cell.
/// Unscorable scales are stored as +inf (zero selection likelihood).
struct CostSample {
  std::size_t n_steps = 0;
  bool octave = false;
  std::vector<double> costs;
  std::size_t failures = 0;
};

inline CostSample sample_costs(const CostModel& cost, std::size_t n_steps, const StepSource& source, bool octave,
                               std::size_t n_samples, Rng& rng) {
  if (n_samples < 1) throw ValidationError("sample_costs: need at least one sample");
  CostSample out;
  out.n_steps = n_steps;
  out.octave = octave;
  out.costs.reserve(n_samples);
  for (std::size_t i = 0; i < n_samples; ++i) {
    const Scale s = sample_melody_scale(n_steps, source, octave, rng);
    const auto c = cost.try_evaluate(s);
    if (c && std::isfinite(*c)) {
      out.costs.push_back(*c);
    } else {
      out.costs.push_back(std::numeric_limits<double>::infinity());
      ++out.failures;
    }
  }
  return out;
}

struct LogZEstimate {
  double log_z = 0.0;
  double std_error = 0.0;
  double beta = 0.0;
  std::size_t n_steps = 0;
  bool octave = false;
  std::size_t n_samples = 0;
};

/// log <e^{-beta C}> over a cost sample, with max subtraction and a delta-method
/// standard error.
inline LogZEstimate estimate_log_mean_likelihood(const CostSample& sample, double beta) {
  if (!(beta >= 0.0)) throw ValidationError("estimate_log_mean_likelihood: beta must be >= 0");
  if (sample.costs.empty()) throw ValidationError("estimate_log_mean_likelihood: empty cost sample");
  LogZEstimate out;
  out.beta = beta;
  out.n_steps = sample.n_steps;
  out.octave = sample.octave;
  out.n_samples = sample.costs.size();
  if (beta == 0.0) return out;
  std::vector<double> terms(sample.costs.size());
  for (std::size_t i = 0; i < terms.size(); ++i) terms[i] = -beta * sample.costs[i];
  const auto lme = log_mean_exp(terms);
  out.log_z = lme.value;
  out.std_error = lme.std_error;
  return out;
}

inline LogZEstimate estimate_log_mean_likelihood(const CostModel& cost, double beta, std::size_t n_steps,
                                                 const StepSource& source, bool octave, std::size_t n_samples,
                                                 Rng& rng) {
  if (n_samples < 1000) throw ValidationError("estimate_log_mean_likelihood: need at least 1000 samples");
  return estimate_log_mean_likelihood(sample_costs(cost, n_steps, source, octave, n_samples, rng), beta);
}

/// Lazily built cost samples per (N_I, octave). The sample for a cell depends only
/// on the seed and the cell, never on query order, and is reused for every beta.
class LogZTable {
 public:
  LogZTable(CostModel cost, StepSource source, std::size_t n_samples, std::uint64_t seed)
      : cost_(std::move(cost)), source_(std::move(source)), n_samples_(n_samples), seed_(seed) {
    if (n_samples_ < 1) throw ValidationError("LogZTable: need at least one sample per cell");
  }

  const CostSample& sample(std::size_t n_steps, bool octave) {
    const auto key = std::make_pair(n_steps, octave);
    auto it = cells_.find(key);
    if (it == cells_.end()) {
      Rng rng(derive_seed(seed_, 2 * static_cast<std::uint64_t>(n_steps) + (octave ? 1 : 0)));
      it = cells_.emplace(key, sample_costs(cost_, n_steps, source_, octave, n_samples_, rng)).first;
    }
    return it->second;
  }

  LogZEstimate get(std::size_t n_steps, bool octave, double beta) {
    return estimate_log_mean_likelihood(sample(n_steps, octave), beta);
  }

  const CostModel& cost() const { return cost_; }
  std::size_t n_samples() const { return n_samples_; }
  const std::map<std::pair<std::size_t, bool>, CostSample>& cells() const { return cells_; }

 private:
  CostModel cost_;
  StepSource source_;
  std::size_t n_samples_;
  std::uint64_t seed_;
  std::map<std::pair<std::size_t, bool>, CostSample> cells_;
};

inline double scale_llr_from_cost(double cost, double beta, double log_z) { return -beta * cost - log_z; }

/// log P_M(S) / P_I(S) = -beta C(S) - log Z'.
inline double scale_llr(const Scale& scale, const CostModel& cost, double beta, const LogZEstimate& log_z) {
  if (log_z.n_steps != scale.n_steps() || log_z.octave != scale.octave()) {
    throw ValidationError("scale_llr: log Z' was estimated for a different N_I or octave mode");
  }
  if (beta != log_z.beta) throw ValidationError("scale_llr: log Z' was estimated at a different beta");
  if (beta == 0.0) return 0.0;
  return scale_llr_from_cost(cost(scale), beta, log_z.log_z);
}

inline double weighted_mean_llr(std::span<const double> llrs, std::span<const double> weights) {
  return weighted_mean(llrs, weights);
}

/// One-sided normal tail p = 1 - Phi(mean sqrt(k)).
inline double llr_significance(double mean_llr, double k) {
  if (!(k > 0.0)) throw ValidationError("llr_significance: k must be positive");
  return 0.5 * std::erfc(mean_llr * std::sqrt(k) / std::sqrt(2.0));
}

inline std::vector<double> default_beta_grid() { return log_grid(1e-2, 1e4, 25); }

struct ComparisonReport {
  std::string model;
  std::vector<double> betas;
  std::vector<double> mean_llr_by_beta;
  std::size_t beta_index = 0;
  double beta_star = 0.0;
  bool at_boundary = false;
  std::vector<std::string> ids;
  std::vector<double> llrs;     // at beta*
  std::vector<double> weights;
  std::vector<std::string> excluded;  // scales the cost model could not score
  double weighted_mean_llr = 0.0;
  double fraction_positive = 0.0;
  double k = 0.0;
  double k_effective = 0.0;
  double threshold = 0.0;  // 2 / sqrt(k)
  double p_value = 1.0;
  double p_value_effective = 1.0;
  bool significant = false;
};

/// Grid search for the beta maximising the weighted mean LLR; ties go to the
/// smallest beta.
inline ComparisonReport optimize_beta(const CostModel& cost, std::span<const Scale> scales,
                                      std::span<const double> weights, LogZTable& table,
                                      std::span<const double> grid) {
  if (scales.size() != weights.size()) throw ValidationError("optimize_beta: one weight per scale required");
  if (grid.empty()) throw ValidationError("optimize_beta: empty beta grid");
  ComparisonReport rep;
  rep.model = cost.name();
  rep.betas.assign(grid.begin(), grid.end());

  std::vector<double> costs, w;
  std::vector<const Scale*> used;
  for (std::size_t i = 0; i < scales.size(); ++i) {
    const auto c = cost.try_evaluate(scales[i]);
    if (!c || !std::isfinite(*c)) {
      rep.excluded.push_back(scales[i].id());
      continue;
    }
    costs.push_back(*c);
    w.push_back(weights[i]);
    used.push_back(&scales[i]);
  }
  if (used.empty()) throw ValidationError("optimize_beta: no scale could be scored by '" + cost.name() + "'");

  auto llrs_at = [&](double beta) {
    std::vector<double> out(used.size());
    std::map<std::pair<std::size_t, bool>, double> cache;
    for (std::size_t i = 0; i < used.size(); ++i) {
      const auto key = std::make_pair(used[i]->n_steps(), used[i]->octave());
      auto it = cache.find(key);
      if (it == cache.end()) it = cache.emplace(key, table.get(key.first, key.second, beta).log_z).first;
      out[i] = beta == 0.0 ? 0.0 : scale_llr_from_cost(costs[i], beta, it->second);
    }
    return out;
  };

  double best = -std::numeric_limits<double>::infinity();
  for (std::size_t b = 0; b < grid.size(); ++b) {
    const double m = weighted_mean(llrs_at(grid[b]), w);
    rep.mean_llr_by_beta.push_back(m);
    if (m > best) {
      best = m;
      rep.beta_index = b;
    }
  }
  rep.beta_star = grid[rep.beta_index];
  rep.at_boundary = grid.size() > 1 && (rep.beta_index == 0 || rep.beta_index + 1 == grid.size());
  rep.llrs = llrs_at(rep.beta_star);
  rep.weights = w;
  for (const auto* s : used) rep.ids.push_back(s->id());
  rep.weighted_mean_llr = weighted_mean(rep.llrs, w);
  std::size_t pos = 0;
  for (double v : rep.llrs) pos += v > 0.0 ? 1 : 0;
  rep.fraction_positive = static_cast<double>(pos) / static_cast<double>(rep.llrs.size());
  rep.k = static_cast<double>(rep.llrs.size());
  rep.k_effective = kish_effective_size(w);
  rep.threshold = 2.0 / std::sqrt(rep.k);
  rep.p_value = llr_significance(rep.weighted_mean_llr, rep.k);
  rep.p_value_effective = llr_significance(rep.weighted_mean_llr, rep.k_effective);
  rep.significant = rep.weighted_mean_llr > rep.threshold;
  return rep;
}

inline ComparisonReport optimize_beta(const CostModel& cost, std::span<const Scale> scales,
                                      std::span<const double> weights, LogZTable& table) {
  const auto grid = default_beta_grid();
  return optimize_beta(cost, scales, weights, table, grid);
}

}  // namespace scalevo
