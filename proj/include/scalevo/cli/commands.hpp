#pragma once

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <iostream>
#include <map>
#include <ostream>
#include <string>
#include <vector>

#include "scalevo/cli/run_config.hpp"
#include "scalevo/comparison.hpp"
#include "scalevo/complexity.hpp"
#include "scalevo/cost_model.hpp"
#include "scalevo/error.hpp"
#include "scalevo/extraction.hpp"
#include "scalevo/generator.hpp"
#include "scalevo/io.hpp"
#include "scalevo/melody.hpp"
#include "scalevo/significance.hpp"
#include "scalevo/weighting.hpp"

namespace scalevo::cli {

/// CLI model names mapped to cost model kinds.
inline std::string model_kind(const std::string& name) {
  static const std::map<std::string, std::string> names = {
      {"melody", "Melody"}, {"of", "OF"},        {"gp", "GP"},           {"hp", "HP"},
      {"hk", "HK"},         {"sethares", "S"},   {"berezovsky", "B"},    {"complexity", "Complexity"},
      {"random", "Random"}, {"constant", "Constant"}};
  auto it = names.find(name);
  if (it == names.end()) throw UsageError("unknown model '" + name + "'");
  return it->second;
}

/// Model spec from config keys; only the keys the model uses are recorded.
inline ModelSpec model_spec(RunConfig& cfg) {
  ModelSpec spec;
  spec.kind = model_kind(cfg.required("model"));
  const auto& k = spec.kind;
  if (k == "OF" || k == "GP") spec.w = cfg.real("w", 20.0);
  if (k == "HP") {
    spec.n = static_cast<int>(cfg.integer("n_partials", 10));
    spec.rho = cfg.real("rho", 1.0);
  }
  if (k == "HK" || k == "S" || k == "B") {
    if (k == "HK") {
      spec.r = cfg.real("r", 1.359);
      spec.canonical_g = cfg.flag("canonical_g", true);
    }
    spec.timbre_partials = static_cast<int>(cfg.integer("timbre_partials", 10));
    spec.timbre_rolloff = cfg.real("timbre_rolloff", 1.0);
    spec.root_hz = cfg.real("root_hz", kDefaultRootHz);
  }
  if (k == "Complexity") spec.complexity_w = cfg.real("complexity_w", 0.0);
  if (k == "Random") spec.seed = cfg.seed();
  if (k == "Constant") spec.value = cfg.real("value", 0.0);
  return spec;
}

/// Baseline step distribution: a CSV file if given, else the Melody preset curve.
inline StepDistribution baseline_distribution(RunConfig& cfg) {
  if (cfg.has("dist")) return io::read_step_distribution(cfg.str("dist", ""));
  MelodyParams p;
  p.sigma_is = cfg.real("sigma_is", melody_presets::kConstrained.sigma_is);
  p.length = static_cast<int>(cfg.integer("length", melody_presets::kConstrained.length));
  p.i0 = cfg.real("i0", melody_presets::kConstrained.i0);
  return melody_distribution(p);
}

inline std::string out_dir(RunConfig& cfg) {
  const auto dir = cfg.required("out");
  std::filesystem::create_directories(dir);
  return dir;
}

inline std::vector<double> beta_grid(RunConfig& cfg) {
  if (cfg.has("beta")) return {cfg.real("beta", 1.0)};
  const auto g = cfg.reals("beta_grid", "0.01,10000,25");
  if (g.size() != 3 || !(g[2] >= 1.0) || g[2] != std::floor(g[2])) {
    throw UsageError("--beta-grid expects LO,HI,N");
  }
  return log_grid(g[0], g[1], static_cast<std::size_t>(g[2]));
}

// ---- fit-melody ------------------------------------------------------------------

inline int cmd_fit_melody(RunConfig& cfg, std::ostream& log) {
  const auto corpora = cfg.list("corpora");
  if (corpora.empty()) throw UsageError("fit-melody needs at least one corpus (--corpora a.csv,b.csv)");
  const auto dir = out_dir(cfg);
  std::vector<double> i0s;
  {
    auto out = io::open_out(dir + "/corpus_i0.csv");
    out << "corpus,i0_cents,i0_semitones\n";
    for (const auto& path : corpora) {
      const auto h = io::read_corpus(path);
      const double i0 = fit_mc(h);
      i0s.push_back(i0);
      out << h.name << ',' << io::fmt(i0) << ',' << io::fmt(i0 / 100.0) << '\n';
    }
  }
  const double mean_i0 = population_mean(i0s);
  io::KeyValues summary;
  summary["n_corpora"] = std::to_string(corpora.size());
  summary["i0_mean_cents"] = io::fmt(mean_i0);
  summary["i0_std_cents"] = io::fmt(population_std(i0s));

  MelodyParams fitted{melody_presets::kConstrained.sigma_is, melody_presets::kConstrained.length, mean_i0};
  if (cfg.has("scales")) {
    const auto scales = io::read_scales(cfg.str("scales", ""));
    std::vector<double> steps;
    for (const auto& s : scales) steps.insert(steps.end(), s.steps().begin(), s.steps().end());
    if (steps.empty()) throw DataError("fit-melody: scale file has no steps");
    const auto emp = StepDistribution::from_samples(steps, {}, default_step_edges());
    const auto fit = fit_is(emp, mean_i0);
    fitted.sigma_is = fit.sigma_is;
    fitted.length = fit.length;
    summary["is_fit_jsd"] = io::fmt(fit.jsd);
    summary["is_fit_degenerate"] = io::fmt_bool(fit.degenerate);
    summary["n_scale_steps"] = std::to_string(steps.size());
  }
  summary["sigma_is"] = io::fmt(fitted.sigma_is);
  summary["length"] = std::to_string(fitted.length);
  io::write_key_values(dir + "/summary.txt", summary);
  io::write_step_distribution(dir + "/step_distribution.csv", melody_distribution(fitted));
  write_manifest(dir, "fit-melody", cfg);
  log << "fit-melody: mean I0 = " << io::fmt(mean_i0) << " cents, sigma_IS = " << io::fmt(fitted.sigma_is)
      << " cents, L = " << fitted.length << '\n';
  return 0;
}

// ---- score -------------------------------------------------------------------------

inline int cmd_score(RunConfig& cfg, std::ostream& log) {
  const auto scales_path = cfg.required("scales");
  const auto cost = make_cost_model(model_spec(cfg));
  const auto dir = out_dir(cfg);
  const auto scales = io::read_scales(scales_path);
  auto out = io::open_out(dir + "/scores.csv");
  out << "id,cost,n_intervals_used,error\n";
  std::size_t failed = 0;
  for (const auto& s : scales) {
    const auto n_used = scored_intervals(s).size();
    try {
      const double c = cost(s);
      out << s.id() << ',' << io::fmt(c) << ',' << n_used << ",\n";
    } catch (const ValidationError& e) {
      ++failed;
      out << s.id() << ",nan," << n_used << ",precondition\n";
    }
  }
  write_manifest(dir, "score", cfg);
  log << "score: " << scales.size() << " scales scored with " << cost.name() << " (" << failed << " failed)\n";
  return 0;
}

// ---- compare -----------------------------------------------------------------------

inline int cmd_compare(RunConfig& cfg, std::ostream& log) {
  const auto scales_path = cfg.required("scales");
  const auto cost = make_cost_model(model_spec(cfg));
  const auto seed = cfg.seed();
  const auto r0 = cfg.count("r0", static_cast<long>(kDefaultRegionCap));
  const auto n_samples = cfg.count("n_samples", 1000000);
  const auto grid = beta_grid(cfg);
  const auto dist = baseline_distribution(cfg);
  const bool weighted = cfg.flag("weighted", true);
  const auto dir = out_dir(cfg);

  const auto scales = io::read_scales(scales_path);
  if (scales.empty()) throw DataError(scales_path + ": no scales");
  const auto weights = weighted ? region_weights(scales, r0) : std::vector<double>(scales.size(), 1.0);
  LogZTable table(cost, dist, n_samples, seed);
  const auto rep = optimize_beta(cost, scales, weights, table, grid);

  {
    auto out = io::open_out(dir + "/report.csv");
    io::write_report_rows(out, rep);
  }
  {
    auto out = io::open_out(dir + "/beta_trace.csv");
    io::write_beta_trace(out, rep);
  }
  {
    auto out = io::open_out(dir + "/logz.csv");
    out << "n_steps,octave,beta,log_z,std_error,n_samples,failures\n";
    for (const auto& [key, sample] : table.cells()) {
      const auto est = estimate_log_mean_likelihood(sample, rep.beta_star);
      out << key.first << ',' << io::fmt_bool(key.second) << ',' << io::fmt(rep.beta_star) << ',' << io::fmt(est.log_z)
          << ',' << io::fmt(est.std_error) << ',' << est.n_samples << ',' << sample.failures << '\n';
    }
  }
  {
    auto out = io::open_out(dir + "/summary.txt");
    io::write_report_summary(out, rep);
    std::vector<double> counts;
    for (const auto& [region, c] : region_counts(scales)) counts.push_back(static_cast<double>(c));
    out << "gini=" << io::fmt(gini(counts)) << '\n';
    out << "gini_capped=" << io::fmt(gini(capped_counts(counts, static_cast<double>(r0)))) << '\n';
  }
  write_manifest(dir, "compare", cfg);
  log << "compare: " << cost.name() << " beta* = " << io::fmt(rep.beta_star)
      << (rep.at_boundary ? " (at grid boundary)" : "") << ", weighted mean LLR = " << io::fmt(rep.weighted_mean_llr)
      << " (threshold " << io::fmt(rep.threshold) << ", p = " << io::fmt(rep.p_value) << ")\n";
  return 0;
}

// ---- generate ----------------------------------------------------------------------

inline StepSource step_source(RunConfig& cfg, std::size_t n_steps, bool octave) {
  if (cfg.str("step_source", "melody") == "uniform") return UniformSteps{0.0, cfg.real("uniform_max", 600.0)};
  const auto dist = baseline_distribution(cfg);
  return octave ? StepSource{octave_rescaled(dist, n_steps)} : StepSource{dist};
}

inline void write_histogram(const std::string& path, std::span<const double> edges, std::span<const double> h) {
  auto out = io::open_out(path);
  out << "bin_low,bin_high,frequency\n";
  for (std::size_t i = 0; i < h.size(); ++i) out << io::fmt(edges[i]) << ',' << io::fmt(edges[i + 1]) << ',' << io::fmt(h[i]) << '\n';
}

inline int cmd_generate(RunConfig& cfg, std::ostream& log) {
  const auto cost = make_cost_model(model_spec(cfg));
  GeneratorConfig g;
  g.n_steps = cfg.count("n_steps", 7);
  g.octave = cfg.flag("octave", false);
  g.beta = cfg.real("beta", 0.0);
  g.population_size = cfg.count("population_size", 10000);
  g.n_repeats = cfg.count("n_repeats", 10);
  g.seed = cfg.seed();
  g.step_source = step_source(cfg, g.n_steps, g.octave);
  const auto dir = out_dir(cfg);
  const double bins = cfg.real("bins", 20.0);
  const auto step_edges = uniform_edges(0.0, 1700.0, bins);
  const auto degree_edges = uniform_edges(0.0, g.octave ? 1200.0 : 1700.0 * static_cast<double>(g.n_steps), bins);

  std::optional<StepDistribution> reference;
  if (cfg.has("reference")) reference = io::read_step_distribution(cfg.str("reference", ""));
  auto ref_hist = [&](const StepDistribution& r) {
    // Reference mass re-binned on the step edges.
    std::vector<double> h(step_edges.size() - 1, 0.0);
    for (std::size_t i = 0; i < r.n_bins(); ++i) {
      auto b = std::upper_bound(step_edges.begin(), step_edges.end(), r.bin_mid(i)) - step_edges.begin() - 1;
      if (b >= 0 && static_cast<std::size_t>(b) < h.size()) h[static_cast<std::size_t>(b)] += r.probabilities()[i];
    }
    return h;
  };

  const Population pop = mcmc_generate(cost, g);
  std::vector<double> ref;
  if (reference) ref = ref_hist(*reference);
  const auto summary = population_summary(pop, step_edges, degree_edges, ref);
  io::write_scales(dir + "/population.csv", pop.scales, pop.costs);
  write_histogram(dir + "/step_hist.csv", summary.step_edges, summary.step_hist);
  if (!summary.degree_hist.empty()) write_histogram(dir + "/degree_hist.csv", summary.degree_edges, summary.degree_hist);
  {
    io::KeyValues kv;
    kv["model"] = cost.name();
    kv["size"] = std::to_string(summary.size);
    kv["mean_cost"] = io::fmt(summary.mean_cost);
    kv["mean_H_OF"] = io::fmt(summary.mean_h_of);
    kv["mean_A_I"] = io::fmt(summary.mean_a_i);
    if (summary.jsd_to_reference) kv["jsd_to_reference"] = io::fmt(*summary.jsd_to_reference);
    io::write_key_values(dir + "/summary.txt", kv);
  }
  const auto sweep = cfg.reals("jsd_betas", "");
  if (reference && !sweep.empty()) {
    auto out = io::open_out(dir + "/jsd_vs_beta.csv");
    out << "beta,jsd_steps\n";
    for (double b : sweep) {
      GeneratorConfig gb = g;
      gb.beta = b;
      const auto p = mcmc_generate(cost, gb);
      const auto s = population_summary(p, step_edges, degree_edges, ref);
      out << io::fmt(b) << ',' << io::fmt(*s.jsd_to_reference) << '\n';
    }
  }
  write_manifest(dir, "generate", cfg);
  log << "generate: " << pop.size() << " scales from " << cost.name() << " at beta = " << io::fmt(g.beta)
      << ", mean cost " << io::fmt(summary.mean_cost) << '\n';
  return 0;
}

// ---- significance ------------------------------------------------------------------

inline int cmd_significance(RunConfig& cfg, std::ostream& log) {
  const auto scales_path = cfg.required("scales");
  const auto seed = cfg.seed();
  const auto n_null = cfg.count("n_null", 1000);
  const double bin = cfg.real("bins", 20.0);
  const double alpha = cfg.real("alpha", 0.05);
  const bool by_region = cfg.flag("by_region", false);
  const auto min_region = cfg.count("min_region", 10);
  const auto dist = baseline_distribution(cfg);
  const auto dir = out_dir(cfg);
  const auto scales = io::read_scales(scales_path);
  if (scales.empty()) throw UsageError("significance: " + scales_path + " contains no scales");

  auto run = [&](std::span<const Scale> subset, std::uint64_t stream, const std::string& path) {
    Rng rng(derive_seed(seed, stream));
    const auto emp = interval_sets(subset);
    const auto null_sets = melody_null_sets(subset, dist, n_null, rng);
    const auto res = interval_significance(emp, null_sets, bin, alpha);
    auto out = io::open_out(path);
    io::write_significance(out, res);
    return res;
  };
  const auto all = run(scales, 0, dir + "/significance.csv");
  log << "significance: " << all.n_raw_significant(alpha) << " of " << all.bins.size()
      << " bins raw-significant, " << all.n_significant() << " after Benjamini-Hochberg\n";
  if (by_region) {
    std::map<std::string, std::vector<Scale>> groups;
    for (const auto& s : scales) groups[s.region()].push_back(s);
    std::uint64_t stream = 1;
    for (const auto& [region, subset] : groups) {
      if (subset.size() < min_region) {
        log << "significance: region '" << region << "' skipped (" << subset.size() << " < " << min_region
            << " scales)\n";
        ++stream;
        continue;
      }
      std::string slug = region;
      std::replace(slug.begin(), slug.end(), ' ', '_');
      run(subset, stream++, dir + "/significance_" + slug + ".csv");
    }
  }
  write_manifest(dir, "significance", cfg);
  return 0;
}

// ---- extract-scale -------------------------------------------------------------------

inline int cmd_extract_scale(RunConfig& cfg, std::ostream& log) {
  const auto track_path = cfg.required("track");
  const auto seed = cfg.seed();
  const double bin = cfg.real("bins", 5.0);
  const bool fold = cfg.flag("fold_octave", false);
  const auto k_str = cfg.str("k", "auto");
  const auto type = parse_scale_type(cfg.str("scale_type", "Vocal"));
  const auto region = cfg.str("region", "synthetic");
  const auto dir = out_dir(cfg);

  const auto track = io::read_pitch_track(track_path);
  const auto hist = pitch_histogram(track, bin, fold);
  io::KeyValues summary;
  GmmFit fit;
  if (k_str == "auto") {
    const auto k_min = cfg.count("k_min", 1);
    const auto k_max = cfg.count("k_max", 12);
    auto res = fit_gmm_auto(hist, k_min, k_max, seed);
    fit = std::move(res.fit);
    std::string bics;
    for (std::size_t i = 0; i < res.ks.size(); ++i) {
      if (i) bics += ';';
      bics += std::to_string(res.ks[i]) + ":" + io::fmt(res.bics[i]);
    }
    summary["bic"] = bics;
  } else {
    long k = 0;
    try {
      k = io::parse_long(k_str, {"option --k", 0}, "k");
    } catch (const DataError&) {
      throw UsageError("--k expects an integer or 'auto'");
    }
    if (k < 1) throw UsageError("--k must be >= 1");
    fit = fit_gmm(hist, static_cast<std::size_t>(k), seed);
  }
  {
    auto out = io::open_out(dir + "/gmm.csv");
    io::write_gmm(out, fit);
  }
  summary["k"] = std::to_string(fit.k);
  summary["log_likelihood"] = io::fmt(fit.log_likelihood);
  summary["converged"] = io::fmt_bool(!fit.warning);
  if (fit.k >= 2) {
    const auto ex = scale_from_gmm(fit, type, region, std::filesystem::path(track_path).stem().string());
    io::write_scales(dir + "/scale.csv", std::vector<Scale>{ex.scale});
    summary["steps_cents"] = io::join_steps(ex.scale.steps());
    summary["close_degrees_warning"] = io::fmt_bool(ex.warning);
    if (ex.scale.n_steps() >= 2) {
      summary["step_std"] = io::fmt(step_std(ex.scale));
      summary["equidistant"] = io::fmt_bool(detect_equidistant(ex.scale));
    }
    if (ex.warning) log << "extract-scale: warning: " << ex.message << '\n';
    log << "extract-scale: K = " << fit.k << ", steps " << io::join_steps(ex.scale.steps()) << '\n';
  } else {
    log << "extract-scale: K = 1, no steps to report\n";
  }
  if (fit.warning) log << "extract-scale: warning: EM did not converge in any restart\n";
  io::write_key_values(dir + "/summary.txt", summary);
  write_manifest(dir, "extract-scale", cfg);
  return 0;
}

// ---- null-range ----------------------------------------------------------------------

inline int cmd_null_range(RunConfig& cfg, std::ostream& log) {
  const auto seed = cfg.seed();
  const auto n_min = cfg.count("n_min", 2);
  const auto n_max = cfg.count("n_max", 10);
  const double range = cfg.real("range", 1700.0);
  const auto chain = cfg.count("chain_length", 1000000);
  const auto dir = out_dir(cfg);
  if (n_min < 1 || n_max < n_min) throw UsageError("null-range needs 1 <= n-min <= n-max");
  auto out = io::open_out(dir + "/null_range.csv");
  out << "n_steps,mc_mean_min,mc_stderr_min,mc_mean_max,mc_stderr_max,quoted_formula_min,uniform_spacing_min\n";
  for (std::size_t n = n_min; n <= n_max; ++n) {
    Rng rng(derive_seed(seed, n));
    const auto t = null_range_population(n, range, chain, rng);
    out << n << ',' << io::fmt(t.mean_min) << ',' << io::fmt(t.stderr_min) << ',' << io::fmt(t.mean_max) << ','
        << io::fmt(t.stderr_max) << ',' << io::fmt(quoted_null_mean_min(n, range)) << ','
        << io::fmt(uniform_spacing_mean_min(n, range)) << '\n';
  }
  write_manifest(dir, "null-range", cfg);
  log << "null-range: table for N_I = " << n_min << ".." << n_max << " written\n";
  return 0;
}

// ---- trajectory ------------------------------------------------------------------------

inline int cmd_trajectory(RunConfig& cfg, std::ostream& log) {
  const auto cost = make_cost_model(model_spec(cfg));
  GeneratorConfig g;
  g.n_steps = cfg.count("n_steps", 5);
  g.octave = cfg.flag("octave", true);
  g.population_size = cfg.count("population_size", 10000);
  g.n_repeats = cfg.count("n_repeats", 10);
  g.seed = cfg.seed();
  g.step_source = step_source(cfg, g.n_steps, g.octave);
  const auto betas = cfg.reals("betas", "0,1,3,10");
  const auto dir = out_dir(cfg);
  const std::vector<TraitProbe> probes = {harmonicity_of_probe(), complexity_probe()};
  const auto rows = trait_trajectory(cost, betas, g, probes);
  auto out = io::open_out(dir + "/trajectory.csv");
  out << "beta,mean_cost,mean_H_OF,mean_A_I\n";
  for (const auto& r : rows) {
    out << io::fmt(r.beta) << ',' << io::fmt(r.mean_cost) << ',' << io::fmt(r.means[0]) << ',' << io::fmt(r.means[1])
        << '\n';
  }
  write_manifest(dir, "trajectory", cfg);
  log << "trajectory: " << rows.size() << " beta values for " << cost.name() << '\n';
  return 0;
}

// ---- table -------------------------------------------------------------------------------

inline int cmd_table(RunConfig& cfg, std::ostream& log) {
  const auto spec = model_spec(cfg);
  const auto dir = out_dir(cfg);
  NormalizedScoreTable table = [&] {
    if (spec.kind == "OF" || spec.kind == "GP" || spec.kind == "HP") {
      HarmonicityModel m;
      m.kind = spec.kind == "OF" ? HarmonicityKind::OF : spec.kind == "GP" ? HarmonicityKind::GP : HarmonicityKind::HP;
      m.w = spec.w;
      m.n = spec.n;
      m.rho = spec.rho;
      return normalize_scores(m);
    }
    if (spec.kind == "HK" || spec.kind == "S" || spec.kind == "B") {
      InterferenceModel m;
      m.kind = spec.kind == "HK" ? InterferenceKind::HK : spec.kind == "S" ? InterferenceKind::S : InterferenceKind::B;
      m.r = spec.r;
      m.canonical_g = spec.canonical_g;
      return dissonance_table(m, Timbre::harmonic(spec.timbre_partials, spec.timbre_rolloff), spec.root_hz);
    }
    throw UsageError("table: model must be one of of, gp, hp, hk, sethares, berezovsky");
  }();
  io::write_score_table(dir + "/score_table.csv", table);
  write_manifest(dir, "table", cfg);
  log << "table: " << table.name() << " written\n";
  return 0;
}

inline const std::map<std::string, int (*)(RunConfig&, std::ostream&)>& commands() {
  static const std::map<std::string, int (*)(RunConfig&, std::ostream&)> table = {
      {"fit-melody", cmd_fit_melody},     {"score", cmd_score},         {"compare", cmd_compare},
      {"generate", cmd_generate},         {"significance", cmd_significance},
      {"extract-scale", cmd_extract_scale}, {"null-range", cmd_null_range}, {"trajectory", cmd_trajectory},
      {"table", cmd_table}};
  return table;
}

/// Runs a command and maps failures to exit codes: 1 usage, 2 data, 3 numerical.
inline int run_command(const std::string& command, RunConfig& cfg, std::ostream& log, std::ostream& err) {
  try {
    auto it = commands().find(command);
    if (it == commands().end()) throw UsageError("unknown command '" + command + "'");
    return it->second(cfg, log);
  } catch (const UsageError& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  } catch (const DataError& e) {
    err << "data error: " << e.what() << '\n';
    return 2;
  } catch (const ValidationError& e) {
    err << "data error: " << e.what() << '\n';
    return 2;
  } catch (const NumericalError& e) {
    err << "numerical error: " << e.what() << '\n';
    return 3;
  } catch (const std::filesystem::filesystem_error& e) {
    err << "data error: " << e.what() << '\n';
    return 2;
  }
}

/// Re-runs the command recorded in a manifest, writing to out_dir.
inline int rerun_manifest(const std::string& manifest_path, const std::string& out, std::ostream& log,
                          std::ostream& err) {
  io::KeyValues kv;
  try {
    kv = io::read_key_values(manifest_path);
  } catch (const DataError& e) {
    err << "data error: " << e.what() << '\n';
    return 2;
  }
  const auto command = kv.count("command") ? kv.at("command") : std::string();
  kv.erase("command");
  kv.erase("version");
  kv.erase(std::string(io::kTimestampKey));
  kv["out"] = out;
  RunConfig cfg(std::move(kv));
  return run_command(command, cfg, log, err);
}

}  // namespace scalevo::cli
