#include <iostream>
#include <map>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "scalevo/cli/commands.hpp"

namespace {

struct OptionDef {
  const char* key;
  const char* help;
};

const std::vector<OptionDef> kModelOptions = {
    {"model", "melody|of|gp|hp|hk|sethares|berezovsky|complexity|random|constant"},
    {"w", "OF/GP window in cents"},
    {"n_partials", "HP partial count"},
    {"rho", "HP roll-off exponent"},
    {"r", "HK exponent"},
    {"canonical_g", "HK bandwidth-distance curve (1) or raw distance (0)"},
    {"timbre_partials", "interference timbre partial count"},
    {"timbre_rolloff", "interference timbre amplitude roll-off"},
    {"root_hz", "reference frequency for interference tables"},
    {"complexity_w", "complexity tolerance in cents (0 = per scale type)"},
    {"value", "cost of the constant model"},
};

const std::vector<OptionDef> kDistOptions = {
    {"dist", "baseline step distribution CSV (bin_low,bin_high,probability)"},
    {"sigma_is", "Melody sigma_IS in cents when no --dist is given"},
    {"length", "Melody L when no --dist is given"},
    {"i0", "Melody I0 in cents when no --dist is given"},
};

const std::map<std::string, std::vector<OptionDef>> kCommandOptions = {
    {"fit-melody", {{"corpora", "comma-separated corpus CSVs (semitone_bin,count)"}, {"scales", "vocal scale CSV"}}},
    {"score", {{"scales", "scale CSV"}}},
    {"compare",
     {{"scales", "scale CSV"},
      {"seed", "random seed"},
      {"r0", "region cap R0"},
      {"n_samples", "Melody samples per N_I for log Z'"},
      {"beta", "single beta instead of a grid"},
      {"beta_grid", "LO,HI,N log-spaced grid"},
      {"weighted", "use region weights (1) or equal weights (0)"}}},
    {"generate",
     {{"seed", "random seed"},
      {"n_steps", "steps per scale"},
      {"octave", "octave scales (1/0)"},
      {"beta", "bias strength"},
      {"population_size", "states recorded per chain"},
      {"n_repeats", "independent chains"},
      {"step_source", "melody|uniform"},
      {"uniform_max", "upper bound of the uniform step source"},
      {"bins", "histogram bin width in cents"},
      {"reference", "reference step distribution CSV for JSD"},
      {"jsd_betas", "comma-separated betas for a JSD-vs-beta table"}}},
    {"significance",
     {{"scales", "scale CSV"},
      {"seed", "random seed"},
      {"n_null", "null populations"},
      {"bins", "bin width in cents"},
      {"alpha", "false discovery rate"},
      {"by_region", "also test each region (1/0)"},
      {"min_region", "minimum scales for a region test"}}},
    {"extract-scale",
     {{"track", "pitch track CSV (time_s,cents,voiced)"},
      {"seed", "random seed"},
      {"k", "number of components or 'auto'"},
      {"k_min", "smallest K for auto"},
      {"k_max", "largest K for auto"},
      {"bins", "histogram bin width in cents"},
      {"fold_octave", "fold pitch mod 1200 (1/0)"},
      {"scale_type", "Vocal|Instrumental|Theory"},
      {"region", "region label of the extracted scale"}}},
    {"null-range",
     {{"seed", "random seed"},
      {"n_min", "smallest N_I"},
      {"n_max", "largest N_I"},
      {"range", "maximum range R in cents"},
      {"chain_length", "chain length per N_I"}}},
    {"trajectory",
     {{"seed", "random seed"},
      {"n_steps", "steps per scale"},
      {"octave", "octave scales (1/0)"},
      {"population_size", "states recorded per chain"},
      {"n_repeats", "independent chains"},
      {"step_source", "melody|uniform"},
      {"betas", "comma-separated betas"}}},
    {"table", {}},
};

bool uses_model(const std::string& cmd) { return cmd != "fit-melody" && cmd != "significance" && cmd != "extract-scale" && cmd != "null-range"; }
bool uses_dist(const std::string& cmd) {
  return cmd == "compare" || cmd == "generate" || cmd == "significance" || cmd == "trajectory";
}

std::string flag_name(const std::string& key) { return "--" + scalevo::cli::RunConfig::dashed(key); }

}  // namespace

const std::map<std::string, std::string> kCommandHelp = {
    {"fit-melody", "fit I0 per corpus and (sigma_IS, L) to a step distribution"},
    {"score", "cost of every scale under one model"},
    {"compare", "beta search and log-likelihood ratio against the Melody model"},
    {"generate", "MCMC population biased by a cost model"},
    {"significance", "per-bin binomial test of interval frequencies against Melody null populations"},
    {"extract-scale", "GMM scale degrees from a pitch track"},
    {"null-range", "mean smallest and largest step of the range-limited null model"},
    {"trajectory", "population means of H_OF and A_I across beta"},
    {"table", "normalised score table on the 0..1250 cent grid"},
};

int main(int argc, char** argv) {
  CLI::App app{"Generative models of musical-scale evolution: fitting, scoring, sampling and model comparison."};
  app.require_subcommand(0, 1);
  std::string manifest;
  std::string manifest_out;
  app.add_option("--manifest", manifest, "re-run the command recorded in a manifest file");
  app.add_option("--out", manifest_out, "output directory for --manifest re-runs");

  std::map<std::string, std::map<std::string, std::string>> values;
  std::map<std::string, std::string> config_files;
  std::map<std::string, CLI::App*> subs;
  for (const auto& [cmd, opts] : kCommandOptions) {
    auto* sub = app.add_subcommand(cmd, kCommandHelp.at(cmd));
    subs[cmd] = sub;
    auto& store = values[cmd];
    sub->add_option("--config", config_files[cmd], "key=value file; flags override its values");
    sub->add_option("--out", store["out"], "output directory")->required();
    std::vector<OptionDef> all = opts;
    if (uses_model(cmd)) all.insert(all.end(), kModelOptions.begin(), kModelOptions.end());
    if (uses_dist(cmd)) all.insert(all.end(), kDistOptions.begin(), kDistOptions.end());
    for (const auto& o : all) sub->add_option(flag_name(o.key), store[o.key], o.help);
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  if (!manifest.empty()) {
    if (manifest_out.empty()) {
      std::cerr << "error: --manifest needs --out\n";
      return 1;
    }
    return scalevo::cli::rerun_manifest(manifest, manifest_out, std::cout, std::cerr);
  }
  for (const auto& [cmd, sub] : subs) {
    if (!sub->parsed()) continue;
    scalevo::io::KeyValues kv;
    if (!config_files[cmd].empty()) {
      try {
        kv = scalevo::io::read_key_values(config_files[cmd]);
      } catch (const scalevo::DataError& e) {
        std::cerr << "data error: " << e.what() << '\n';
        return 2;
      }
    }
    for (const auto& [k, v] : values[cmd]) {
      if (!v.empty()) kv[k] = v;
    }
    scalevo::cli::RunConfig cfg(std::move(kv));
    return scalevo::cli::run_command(cmd, cfg, std::cout, std::cerr);
  }
  std::cerr << app.help();
  return 1;
}
