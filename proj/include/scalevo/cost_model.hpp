#pragma once

#include <bit>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <memory>
#include <optional>
#include <string>
#include <utility>

#include "scalevo/complexity.hpp"
#include "scalevo/error.hpp"
#include "scalevo/harmonicity.hpp"
#include "scalevo/interference.hpp"
#include "scalevo/rng.hpp"
#include "scalevo/scale.hpp"

namespace scalevo {

/// A named scoring rule mapping a scale to a scalar cost (lower is preferred).
/// Copies share the underlying immutable tables, so a CostModel is safe to use
/// from several threads at once.
class CostModel {
 public:
  using Fn = std::function<double(const Scale&)>;

  CostModel(std::string name, Fn fn) : name_(std::move(name)), fn_(std::move(fn)) {
    if (!fn_) throw ValidationError("CostModel '" + name_ + "' has no cost function");
  }

  const std::string& name() const { return name_; }

  double operator()(const Scale& scale) const { return fn_(scale); }

  /// The cost, or nullopt when the scale cannot be scored (for example every
  /// interval lies above 1250 cents).
  std::optional<double> try_evaluate(const Scale& scale) const {
    try {
      const double c = fn_(scale);
      if (std::isnan(c)) return std::nullopt;
      return c;
    } catch (const ValidationError&) {
      return std::nullopt;
    }
  }

  static CostModel harmony(const HarmonicityModel& model) {
    auto table = std::make_shared<const NormalizedScoreTable>(normalize_scores(model));
    return CostModel(model.name(), [table](const Scale& s) { return harmony_cost(s, *table); });
  }

  static CostModel interference(const InterferenceModel& model, const Timbre& timbre = Timbre::harmonic(),
                                double root_hz = kDefaultRootHz) {
    auto table = std::make_shared<const NormalizedScoreTable>(dissonance_table(model, timbre, root_hz));
    return CostModel(model.name(), [table](const Scale& s) { return interference_cost(s, *table); });
  }

  /// Interval-category count; w <= 0 picks the preset for each scale's type.
  static CostModel complexity(double w = 0.0) {
    return CostModel("Complexity", [w](const Scale& s) {
      return static_cast<double>(w > 0.0 ? complexity_cost(s, w) : complexity_cost(s));
    });
  }

  /// The Melody baseline: no selection beyond the step distribution itself.
  static CostModel melody() {
    return CostModel("Melody", [](const Scale&) { return 0.0; });
  }

  static CostModel constant(double value) {
    return CostModel("Constant", [value](const Scale&) { return value; });
  }

  /// A fixed standard-normal cost per distinct step list, derived by hashing the
  /// steps with the seed. Used as a null model for LLR thresholds.
  static CostModel random_gaussian(std::uint64_t seed) {
    return CostModel("Random", [seed](const Scale& s) {
      std::uint64_t h = splitmix64(seed ^ 0x5ca1ab1eULL);
      for (double v : s.steps()) h = splitmix64(h ^ std::bit_cast<std::uint64_t>(v));
      const double u1 = (static_cast<double>(splitmix64(h) >> 11) + 0.5) * 0x1.0p-53;
      const double u2 = static_cast<double>(splitmix64(h + 1) >> 11) * 0x1.0p-53;
      return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * 3.14159265358979323846 * u2);
    });
  }

 private:
  std::string name_;
  Fn fn_;
};

/// Flat description of a cost model, as read from config files or flags.
struct ModelSpec {
  std::string kind = "OF";  // Melody, OF, GP, HP, HK, S, B, Complexity, Random, Constant
  double w = 20.0;          // OF/GP window
  double complexity_w = 0.0;  // <= 0 means per-type preset
  int n = 10;
  double rho = 1.0;
  double r = 1.359;
  bool canonical_g = true;
  int timbre_partials = 10;
  double timbre_rolloff = 1.0;
  double root_hz = kDefaultRootHz;
  std::uint64_t seed = 1;
  double value = 0.0;
};

inline CostModel make_cost_model(const ModelSpec& spec) {
  const auto& k = spec.kind;
  if (k == "Melody") return CostModel::melody();
  if (k == "OF" || k == "GP" || k == "HP") {
    HarmonicityModel m;
    m.kind = k == "OF" ? HarmonicityKind::OF : k == "GP" ? HarmonicityKind::GP : HarmonicityKind::HP;
    m.w = spec.w;
    m.n = spec.n;
    m.rho = spec.rho;
    return CostModel::harmony(m);
  }
  if (k == "HK" || k == "S" || k == "B") {
    InterferenceModel m;
    m.kind = k == "HK" ? InterferenceKind::HK : k == "S" ? InterferenceKind::S : InterferenceKind::B;
    m.r = spec.r;
    m.canonical_g = spec.canonical_g;
    return CostModel::interference(m, Timbre::harmonic(spec.timbre_partials, spec.timbre_rolloff), spec.root_hz);
  }
  if (k == "Complexity") return CostModel::complexity(spec.complexity_w);
  if (k == "Random") return CostModel::random_gaussian(spec.seed);
  if (k == "Constant") return CostModel::constant(spec.value);
  throw ValidationError("unknown cost model '" + k + "'");
}

}  // namespace scalevo
