#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "scalevo/complexity.hpp"
#include "scalevo/cost_model.hpp"
#include "scalevo/error.hpp"
#include "scalevo/harmonicity.hpp"
#include "scalevo/melody.hpp"
#include "scalevo/parallel.hpp"
#include "scalevo/rng.hpp"
#include "scalevo/scale.hpp"
#include "scalevo/stats.hpp"
#include "scalevo/step_distribution.hpp"

namespace scalevo {

/// Steps drawn uniformly from (lo, hi). Its P_I ratio is taken to be one for every move.
struct UniformSteps {
  double lo = 0.0;
  double hi = 600.0;
};

using StepSource = std::variant<StepDistribution, UniformSteps>;

inline double draw_step(const StepSource& source, Rng& rng) {
  for (int attempt = 0; attempt < 1000; ++attempt) {
    const double s = std::holds_alternative<UniformSteps>(source)
                         ? rng.uniform(std::get<UniformSteps>(source).lo, std::get<UniformSteps>(source).hi)
                         : std::get<StepDistribution>(source).sample(rng);
    if (s > 0.0) return s;
  }
  throw NumericalError("step source only produces zero-cent steps");
}

/// log P_I of a step list; 0 for the uniform source, -inf outside the support.
inline double log_step_probability(const StepSource& source, std::span<const double> steps) {
  if (std::holds_alternative<UniformSteps>(source)) return 0.0;
  return melody_scale_probability(steps, std::get<StepDistribution>(source)).value;
}

inline Scale make_generated_scale(std::vector<double> steps, bool octave) {
  return Scale(std::move(steps), octave ? ScaleType::Theory : ScaleType::Vocal, "synthetic", octave);
}

/// n_steps i.i.d. steps; octave scales are rescaled to sum to 1200 cents.
inline Scale sample_melody_scale(std::size_t n_steps, const StepSource& source, bool octave, Rng& rng) {
  if (n_steps < 1) throw ValidationError("sample_melody_scale: need at least one step");
  std::vector<double> steps(n_steps);
  double sum = 0.0;
  for (auto& s : steps) {
    s = draw_step(source, rng);
    sum += s;
  }
  if (octave) {
    for (auto& s : steps) s *= kOctaveCents / sum;
  }
  return make_generated_scale(std::move(steps), octave);
}

inline Scale sample_melody_scale(std::size_t n_steps, const StepDistribution& dist, bool octave, Rng& rng) {
  return sample_melody_scale(n_steps, StepSource{dist}, octave, rng);
}

struct GeneratorConfig {
  std::size_t n_steps = 7;
  double beta = 0.0;
  StepSource step_source = UniformSteps{};
  bool octave = false;
  std::size_t population_size = 10000;  // per chain
  std::size_t n_repeats = 10;
  std::uint64_t seed = 1;
  std::array<double, 3> move_probs{0.5, 0.4, 0.1};  // regenerate, perturb, shuffle
  double perturb_width = 50.0;

  void validate() const {
    if (n_steps < 1) throw ValidationError("GeneratorConfig: n_steps must be >= 1");
    if (!(beta >= 0.0) || !std::isfinite(beta)) throw ValidationError("GeneratorConfig: beta must be finite and >= 0");
    if (population_size < 1) throw ValidationError("GeneratorConfig: population_size must be >= 1");
    if (n_repeats < 1) throw ValidationError("GeneratorConfig: n_repeats must be >= 1");
    double total = 0.0;
    for (double p : move_probs) {
      if (!(p >= 0.0)) throw ValidationError("GeneratorConfig: move probabilities must be >= 0");
      total += p;
    }
    if (std::abs(total - 1.0) > 1e-9) throw ValidationError("GeneratorConfig: move probabilities must sum to 1");
    if (!(perturb_width > 0.0)) throw ValidationError("GeneratorConfig: perturb_width must be positive");
    if (octave && n_steps < 2) throw ValidationError("GeneratorConfig: octave scales need at least two steps");
  }
};

struct Population {
  std::vector<Scale> scales;
  std::vector<double> costs;

  std::size_t size() const { return scales.size(); }
  void append(const Population& other) {
    scales.insert(scales.end(), other.scales.begin(), other.scales.end());
    costs.insert(costs.end(), other.costs.begin(), other.costs.end());
  }
};

struct ChainStats {
  std::size_t proposed = 0;
  std::size_t accepted = 0;
  double acceptance_rate() const { return proposed ? static_cast<double>(accepted) / static_cast<double>(proposed) : 0.0; }
};

namespace detail {

/// Perturbs one degree by U(-width, width). Returns nullopt when the move leaves
/// the state space (negative degree or coincident degrees); the caller keeps the
/// incumbent in that case.
inline std::optional<std::vector<double>> perturb_steps(const std::vector<double>& steps, bool octave, double width,
                                                        Rng& rng) {
  const std::size_t n = steps.size();
  std::vector<double> d(n + 1, 0.0);
  for (std::size_t i = 0; i < n; ++i) d[i + 1] = d[i] + steps[i];
  const double delta = rng.uniform(-width, width);
  if (octave) {
    // Pitch classes 0..n-1; the terminal octave is implied.
    d.pop_back();
    const std::size_t j = rng.index(n);
    double v = std::fmod(d[j] + delta, kOctaveCents);
    if (v < 0.0) v += kOctaveCents;
    d[j] = v;
    std::sort(d.begin(), d.end());
    std::vector<double> out(n);
    for (std::size_t i = 0; i + 1 < n; ++i) out[i] = d[i + 1] - d[i];
    out[n - 1] = kOctaveCents - (d[n - 1] - d[0]);
    for (double s : out) {
      if (!(s > 0.0)) return std::nullopt;
    }
    // Pin the sum to exactly one octave against rounding drift.
    double sum = 0.0;
    for (std::size_t i = 0; i + 1 < n; ++i) sum += out[i];
    out[n - 1] = kOctaveCents - sum;
    if (!(out[n - 1] > 0.0)) return std::nullopt;
    return out;
  }
  // Non-octave: the root stays at 0; one of the upper degrees moves.
  const std::size_t j = 1 + rng.index(n);
  d[j] += delta;
  if (d[j] < 0.0) return std::nullopt;
  std::sort(d.begin(), d.end());
  std::vector<double> out(n);
  for (std::size_t i = 0; i < n; ++i) {
    out[i] = d[i + 1] - d[i];
    if (!(out[i] > 0.0)) return std::nullopt;
  }
  return out;
}

}  // namespace detail

/// One Metropolis-style chain. Appends every post-decision state until `size`
/// states have been recorded.
inline Population mcmc_chain(const CostModel& cost, const GeneratorConfig& config, Rng& rng,
                             ChainStats* stats = nullptr) {
  config.validate();
  auto evaluate = [&](const Scale& s) {
    const auto c = cost.try_evaluate(s);
    if (!c || !std::isfinite(*c)) {
      throw NumericalError("cost model '" + cost.name() + "' failed on a generated scale during sampling");
    }
    return *c;
  };

  Scale current = sample_melody_scale(config.n_steps, config.step_source, config.octave, rng);
  double current_cost = evaluate(current);
  double current_logp = log_step_probability(config.step_source, current.steps());

  Population pop;
  pop.scales.reserve(config.population_size);
  pop.costs.reserve(config.population_size);
  ChainStats local;
  while (pop.size() < config.population_size) {
    const double u = rng.uniform();
    std::optional<std::vector<double>> proposal;
    if (u < config.move_probs[0]) {
      proposal = sample_melody_scale(config.n_steps, config.step_source, config.octave, rng).steps();
    } else if (u < config.move_probs[0] + config.move_probs[1]) {
      proposal = detail::perturb_steps(current.steps(), config.octave, config.perturb_width, rng);
    } else {
      auto steps = current.steps();
      rng.shuffle(std::span<double>(steps));
      proposal = std::move(steps);
    }
    ++local.proposed;
    if (proposal) {
      const double logp = log_step_probability(config.step_source, *proposal);
      if (std::isfinite(logp)) {
        Scale candidate = make_generated_scale(std::move(*proposal), config.octave);
        const double c = evaluate(candidate);
        const double log_ratio = -config.beta * (c - current_cost) + (logp - current_logp);
        const bool accept = log_ratio >= 0.0 || rng.uniform() < std::exp(log_ratio);
        if (accept) {
          current = std::move(candidate);
          current_cost = c;
          current_logp = logp;
          ++local.accepted;
        }
      }
    }
    pop.scales.push_back(current);
    pop.costs.push_back(current_cost);
  }
  if (stats) *stats = local;
  return pop;
}

/// n_repeats independent chains (seeds derived from config.seed) concatenated in
/// chain order.
inline Population mcmc_generate(const CostModel& cost, const GeneratorConfig& config) {
  config.validate();
  auto chains = parallel_map(config.n_repeats, [&](std::size_t idx) {
    Rng rng(derive_seed(config.seed, idx));
    return mcmc_chain(cost, config, rng);
  });
  Population out;
  for (const auto& c : chains) out.append(c);
  return out;
}

/// Draws a pool of Melody scales and resamples it with weights e^{-beta C}. As the
/// pool grows the result approaches exact draws from P_I(S) e^{-beta C(S)} / Z'.
inline Population importance_resample(const CostModel& cost, double beta, std::size_t n_steps,
                                      const StepSource& source, bool octave, std::size_t pool_size,
                                      std::size_t out_size, Rng& rng) {
  if (pool_size < 1 || out_size < 1) throw ValidationError("importance_resample: sizes must be >= 1");
  std::vector<Scale> pool;
  std::vector<double> costs, logw;
  pool.reserve(pool_size);
  for (std::size_t i = 0; i < pool_size; ++i) {
    Scale s = sample_melody_scale(n_steps, source, octave, rng);
    const auto c = cost.try_evaluate(s);
    if (!c || !std::isfinite(*c)) continue;
    pool.push_back(std::move(s));
    costs.push_back(*c);
    logw.push_back(-beta * *c);
  }
  if (pool.empty()) throw NumericalError("importance_resample: no scale in the pool could be scored");
  const double mx = *std::max_element(logw.begin(), logw.end());
  std::vector<double> cdf(logw.size());
  double acc = 0.0;
  for (std::size_t i = 0; i < logw.size(); ++i) {
    acc += std::exp(logw[i] - mx);
    cdf[i] = acc;
  }
  Population out;
  for (std::size_t i = 0; i < out_size; ++i) {
    const double u = rng.uniform() * acc;
    auto it = std::upper_bound(cdf.begin(), cdf.end(), u);
    const auto k = std::min(static_cast<std::size_t>(it - cdf.begin()), cdf.size() - 1);
    out.scales.push_back(pool[k]);
    out.costs.push_back(costs[k]);
  }
  return out;
}

/// Rejection-samples Melody scales until `size` of them have range <= R.
inline Population range_filtered_population(std::size_t n_steps, const StepDistribution& dist, double max_range,
                                            std::size_t size, Rng& rng) {
  if (!(max_range > 0.0)) throw ValidationError("range_filtered_population: R must be positive");
  if (static_cast<double>(n_steps) * dist.min_support() > max_range) {
    throw NumericalError("range_filtered_population: " + std::to_string(n_steps) +
                         " steps cannot fit in R = " + std::to_string(max_range) + " cents with this step distribution");
  }
  constexpr std::size_t kProbe = 1000000;
  constexpr double kMinAcceptance = 1e-6;
  Population out;
  std::size_t attempts = 0;
  while (out.size() < size) {
    Scale s = sample_melody_scale(n_steps, dist, false, rng);
    ++attempts;
    if (s.range() <= max_range) {
      out.scales.push_back(std::move(s));
      out.costs.push_back(0.0);
    }
    if (attempts >= kProbe && static_cast<double>(out.size()) / static_cast<double>(attempts) < kMinAcceptance) {
      throw NumericalError("range_filtered_population: acceptance rate below 1e-6 after " + std::to_string(attempts) +
                           " draws (R = " + std::to_string(max_range) + " cents)");
    }
  }
  return out;
}

/// Min/max step per state of the uniform-degree null chain.
struct NullRangeTrace {
  std::size_t n_steps = 0;
  double max_range = 0.0;
  std::vector<double> min_steps;
  std::vector<double> max_steps;
  std::vector<double> ranges;
  double mean_min = 0.0;
  double mean_max = 0.0;
  double stderr_min = 0.0;  // batch means
  double stderr_max = 0.0;
};

inline double batch_means_stderr(std::span<const double> xs, std::size_t n_batches = 50) {
  if (xs.size() < 2 * n_batches) n_batches = std::max<std::size_t>(2, xs.size() / 2);
  if (xs.size() < 2) return 0.0;
  const std::size_t b = xs.size() / n_batches;
  std::vector<double> means;
  for (std::size_t i = 0; i < n_batches; ++i) {
    double acc = 0.0;
    for (std::size_t j = i * b; j < (i + 1) * b; ++j) acc += xs[j];
    means.push_back(acc / static_cast<double>(b));
  }
  const double m = population_mean(means);
  double v = 0.0;
  for (double x : means) v += (x - m) * (x - m);
  v /= static_cast<double>(n_batches - 1);
  return std::sqrt(v / static_cast<double>(n_batches));
}

/// N_I + 1 degrees on [0, R); each state moves one degree by U(-100, 100) cents,
/// wraps it modulo R and re-sorts. Steps are the gaps between sorted degrees.
inline NullRangeTrace null_range_population(std::size_t n_steps, double max_range, std::size_t chain_length,
                                            Rng& rng) {
  if (!(max_range > 0.0)) throw ValidationError("null_range_population: R must be positive");
  if (n_steps < 1) throw ValidationError("null_range_population: need at least one step");
  if (chain_length < 1) throw ValidationError("null_range_population: chain_length must be >= 1");
  std::vector<double> d(n_steps + 1);
  for (auto& x : d) x = rng.uniform(0.0, max_range);
  std::sort(d.begin(), d.end());

  NullRangeTrace out;
  out.n_steps = n_steps;
  out.max_range = max_range;
  out.min_steps.reserve(chain_length);
  out.max_steps.reserve(chain_length);
  out.ranges.reserve(chain_length);
  for (std::size_t t = 0; t < chain_length; ++t) {
    const std::size_t j = rng.index(d.size());
    double v = std::fmod(d[j] + rng.uniform(-100.0, 100.0), max_range);
    if (v < 0.0) v += max_range;
    d[j] = v;
    std::sort(d.begin(), d.end());
    double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
    for (std::size_t i = 0; i < n_steps; ++i) {
      const double s = d[i + 1] - d[i];
      lo = std::min(lo, s);
      hi = std::max(hi, s);
    }
    out.min_steps.push_back(lo);
    out.max_steps.push_back(hi);
    out.ranges.push_back(d.back() - d.front());
  }
  out.mean_min = population_mean(out.min_steps);
  out.mean_max = population_mean(out.max_steps);
  out.stderr_min = batch_means_stderr(out.min_steps);
  out.stderr_max = batch_means_stderr(out.max_steps);
  return out;
}

/// Expected smallest gap among N_I spacings of N_I + 1 uniform points on [0, R).
inline double uniform_spacing_mean_min(std::size_t n_steps, double max_range) {
  const double n = static_cast<double>(n_steps);
  return max_range / (n * (n + 2.0));
}

/// The closed form R / (N_I (N_I - 1)) quoted for the null range model (undefined for N_I = 1).
inline double quoted_null_mean_min(std::size_t n_steps, double max_range) {
  const double n = static_cast<double>(n_steps);
  return n_steps < 2 ? std::numeric_limits<double>::quiet_NaN() : max_range / (n * (n - 1.0));
}

/// A scalar trait of a scale, averaged over populations.
struct TraitProbe {
  std::string name;
  std::function<double(const Scale&)> fn;
};

/// <H_OF>: mean OF z-score of the scored intervals (w = 20).
inline TraitProbe harmonicity_of_probe(double w = 20.0) {
  HarmonicityModel m;
  m.w = w;
  auto table = std::make_shared<const NormalizedScoreTable>(normalize_scores(m));
  return {"mean_H_OF", [table](const Scale& s) { return -harmony_cost(s, *table); }};
}

/// A_I with the preset w for the scale's type (or a fixed w when w > 0).
inline TraitProbe complexity_probe(double w = 0.0) {
  return {"mean_A_I", [w](const Scale& s) {
            return static_cast<double>(w > 0.0 ? complexity_cost(s, w) : complexity_cost(s));
          }};
}

struct TrajectoryRow {
  double beta = 0.0;
  std::vector<double> means;  // one per probe
  double mean_cost = 0.0;
};

/// Generates a population per beta with one cost model and reports probe means.
inline std::vector<TrajectoryRow> trait_trajectory(const CostModel& cost, std::span<const double> betas,
                                                   GeneratorConfig config, std::span<const TraitProbe> probes) {
  std::vector<TrajectoryRow> rows;
  for (double beta : betas) {
    config.beta = beta;
    const Population pop = mcmc_generate(cost, config);
    TrajectoryRow row;
    row.beta = beta;
    for (const auto& probe : probes) {
      double acc = 0.0;
      std::size_t used = 0;
      for (const auto& s : pop.scales) {
        try {
          acc += probe.fn(s);
          ++used;
        } catch (const ValidationError&) {
        }
      }
      row.means.push_back(used ? acc / static_cast<double>(used) : std::numeric_limits<double>::quiet_NaN());
    }
    row.mean_cost = population_mean(pop.costs);
    rows.push_back(std::move(row));
  }
  return rows;
}

struct PopulationSummary {
  std::size_t size = 0;
  std::vector<double> step_edges;
  std::vector<double> step_hist;    // normalised
  std::vector<double> degree_edges;
  std::vector<double> degree_hist;  // normalised; empty when N_I varies
  double mean_cost = 0.0;
  double mean_h_of = 0.0;
  double mean_a_i = 0.0;
  std::optional<double> jsd_to_reference;
};

inline PopulationSummary population_summary(const Population& pop, std::vector<double> step_edges = default_step_edges(),
                                            std::vector<double> degree_edges = uniform_edges(0.0, 1700.0, 20.0),
                                            std::span<const double> reference = {}) {
  if (pop.size() == 0) throw ValidationError("population_summary: empty population");
  PopulationSummary out;
  out.size = pop.size();
  std::vector<double> steps, degrees;
  bool fixed_n = true;
  const auto n0 = pop.scales.front().n_steps();
  for (const auto& s : pop.scales) {
    steps.insert(steps.end(), s.steps().begin(), s.steps().end());
    fixed_n = fixed_n && s.n_steps() == n0;
    const auto d = degrees_from_steps(s.steps()).degrees;
    degrees.insert(degrees.end(), d.begin() + 1, d.end());
  }
  auto norm = [](std::vector<double> h) {
    double t = 0.0;
    for (double v : h) t += v;
    if (t > 0.0) {
      for (double& v : h) v /= t;
    }
    return h;
  };
  out.step_hist = norm(histogram(steps, {}, step_edges));
  out.step_edges = std::move(step_edges);
  if (fixed_n) out.degree_hist = norm(histogram(degrees, {}, degree_edges));
  out.degree_edges = std::move(degree_edges);
  out.mean_cost = population_mean(pop.costs);

  const auto h_probe = harmonicity_of_probe();
  const auto a_probe = complexity_probe();
  double h = 0.0, a = 0.0;
  std::size_t used = 0;
  for (const auto& s : pop.scales) {
    try {
      const double hv = h_probe.fn(s);
      const double av = a_probe.fn(s);
      h += hv;
      a += av;
      ++used;
    } catch (const ValidationError&) {
    }
  }
  out.mean_h_of = used ? h / static_cast<double>(used) : std::numeric_limits<double>::quiet_NaN();
  out.mean_a_i = used ? a / static_cast<double>(used) : std::numeric_limits<double>::quiet_NaN();
  if (!reference.empty()) {
    if (reference.size() != out.step_hist.size()) {
      throw ValidationError("population_summary: reference histogram needs one value per step bin");
    }
    out.jsd_to_reference = jensen_shannon(out.step_hist, reference);
  }
  return out;
}

}  // namespace scalevo
