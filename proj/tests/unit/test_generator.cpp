#include <gtest/gtest.h>

#include <cmath>

#include "scalevo/cost_model.hpp"
#include "scalevo/generator.hpp"
#include "scalevo/melody.hpp"

using namespace scalevo;

namespace {
StepDistribution melody_dist() { return melody_distribution(melody_presets::kConstrained); }
}  // namespace

TEST(SampleMelodyScale, OctaveSumsTo1200) {
  Rng rng(1);
  const StepSource src = melody_dist();
  for (int i = 0; i < 100; ++i) {
    const auto s = sample_melody_scale(7, src, true, rng);
    double sum = 0.0;
    for (double x : s.steps()) sum += x;
    EXPECT_NEAR(sum, 1200.0, 1e-6);
    EXPECT_EQ(s.type(), ScaleType::Theory);
  }
  const auto v = sample_melody_scale(4, src, false, rng);
  EXPECT_EQ(v.type(), ScaleType::Vocal);
  EXPECT_EQ(v.n_steps(), 4u);
}

TEST(PerturbSteps, KeepsStateSpace) {
  Rng rng(2);
  const std::vector<double> steps{100, 200, 300, 600};
  for (int i = 0; i < 2000; ++i) {
    const auto p = detail::perturb_steps(steps, true, 50.0, rng);
    if (!p) continue;
    double sum = 0.0;
    for (double x : *p) {
      EXPECT_GT(x, 0.0);
      sum += x;
    }
    EXPECT_DOUBLE_EQ(sum, 1200.0);
  }
  const std::vector<double> tight{1.0, 500.0};
  std::size_t rejected = 0;
  for (int i = 0; i < 2000; ++i) {
    const auto p = detail::perturb_steps(tight, false, 50.0, rng);
    if (!p) {
      ++rejected;
      continue;
    }
    EXPECT_EQ(p->size(), 2u);
    for (double x : *p) EXPECT_GT(x, 0.0);
  }
  EXPECT_GT(rejected, 0u);
}

TEST(GeneratorConfig, Validation) {
  GeneratorConfig c;
  EXPECT_NO_THROW(c.validate());
  c.move_probs = {0.5, 0.5, 0.5};
  EXPECT_THROW(c.validate(), ValidationError);
  c = {};
  c.beta = -1.0;
  EXPECT_THROW(c.validate(), ValidationError);
  c = {};
  c.octave = true;
  c.n_steps = 1;
  EXPECT_THROW(c.validate(), ValidationError);
}

TEST(McmcGenerate, SizeAndDeterminism) {
  GeneratorConfig c;
  c.n_steps = 5;
  c.beta = 2.0;
  c.population_size = 300;
  c.n_repeats = 3;
  c.seed = 42;
  HarmonicityModel m;
  const auto cost = CostModel::harmony(m);
  const auto a = mcmc_generate(cost, c);
  const auto b = mcmc_generate(cost, c);
  ASSERT_EQ(a.size(), 900u);
  for (std::size_t i = 0; i < a.size(); ++i) {
    EXPECT_EQ(a.scales[i].steps(), b.scales[i].steps());
    EXPECT_DOUBLE_EQ(a.costs[i], cost(a.scales[i]));
  }
}

TEST(McmcChain, ConstantCostAlwaysAccepts) {
  GeneratorConfig c;
  c.n_steps = 4;
  c.beta = 3.0;
  c.population_size = 500;
  c.n_repeats = 1;
  c.move_probs = {1.0, 0.0, 0.0};
  c.step_source = UniformSteps{};
  Rng rng(5);
  ChainStats stats;
  mcmc_chain(CostModel::constant(1.0), c, rng, &stats);
  EXPECT_EQ(stats.proposed, 500u);
  // Flat cost and a uniform source give a log acceptance ratio of exactly zero.
  EXPECT_EQ(stats.accepted, 500u);
}

TEST(McmcGenerate, HighBetaLowersCost) {
  GeneratorConfig c;
  c.n_steps = 5;
  c.octave = true;
  c.population_size = 2000;
  c.n_repeats = 2;
  const auto cost = CostModel::harmony(HarmonicityModel{});
  c.beta = 0.0;
  const double cold = population_mean(mcmc_generate(cost, c).costs);
  c.beta = 5.0;
  const double hot = population_mean(mcmc_generate(cost, c).costs);
  EXPECT_LT(hot, cold - 0.3);
}

TEST(ImportanceResample, FavoursLowCost) {
  Rng rng(8);
  const auto cost = CostModel::harmony(HarmonicityModel{});
  const auto base = importance_resample(cost, 0.0, 5, UniformSteps{}, true, 2000, 2000, rng);
  const auto tilted = importance_resample(cost, 5.0, 5, UniformSteps{}, true, 2000, 2000, rng);
  EXPECT_LT(population_mean(tilted.costs), population_mean(base.costs));
  EXPECT_THROW(importance_resample(cost, 1.0, 5, UniformSteps{}, true, 0, 10, rng), ValidationError);
}

TEST(RangeFiltered, RespectsRangeAndFeasibility) {
  Rng rng(9);
  const auto dist = melody_dist();
  const auto pop = range_filtered_population(3, dist, 600.0, 200, rng);
  ASSERT_EQ(pop.size(), 200u);
  for (const auto& s : pop.scales) EXPECT_LE(s.range(), 600.0);
  const auto shifted = StepDistribution({100.0, 200.0}, {1.0});
  EXPECT_THROW(range_filtered_population(10, shifted, 500.0, 1, rng), NumericalError);
}

TEST(NullRange, UniformSpacingClosedForm) {
  EXPECT_DOUBLE_EQ(uniform_spacing_mean_min(4, 1700.0), 1700.0 / 24.0);
  EXPECT_DOUBLE_EQ(quoted_null_mean_min(4, 1700.0), 1700.0 / 12.0);
  EXPECT_TRUE(std::isnan(quoted_null_mean_min(1, 1700.0)));
  Rng rng(10);
  const auto t = null_range_population(3, 1700.0, 200000, rng);
  EXPECT_EQ(t.min_steps.size(), 200000u);
  EXPECT_NEAR(t.mean_min, uniform_spacing_mean_min(3, 1700.0), 5.0 * t.stderr_min + 1.0);
  for (double r : t.ranges) EXPECT_LT(r, 1700.0);
}

TEST(BatchMeans, ConstantSeriesHasZeroError) {
  const std::vector<double> xs(1000, 3.0);
  EXPECT_DOUBLE_EQ(batch_means_stderr(xs), 0.0);
}

TEST(PopulationSummary, HistogramsNormalised) {
  Population pop;
  pop.scales = {Scale({200, 300}), Scale({250, 350})};
  pop.costs = {1.0, 3.0};
  const auto s = population_summary(pop);
  double total = 0.0;
  for (double v : s.step_hist) total += v;
  EXPECT_NEAR(total, 1.0, 1e-12);
  EXPECT_DOUBLE_EQ(s.mean_cost, 2.0);
  EXPECT_FALSE(s.degree_hist.empty());
  EXPECT_FALSE(s.jsd_to_reference.has_value());
  const auto self = population_summary(pop, default_step_edges(), uniform_edges(0.0, 1700.0, 20.0), s.step_hist);
  EXPECT_NEAR(*self.jsd_to_reference, 0.0, 1e-12);
}

TEST(TraitTrajectory, OneRowPerBeta) {
  GeneratorConfig c;
  c.n_steps = 5;
  c.octave = true;
  c.population_size = 200;
  c.n_repeats = 2;
  const std::vector<double> betas{0.0, 2.0};
  const std::vector<TraitProbe> probes{harmonicity_of_probe(), complexity_probe()};
  const auto rows = trait_trajectory(CostModel::harmony(HarmonicityModel{}), betas, c, probes);
  ASSERT_EQ(rows.size(), 2u);
  EXPECT_EQ(rows[1].means.size(), 2u);
  EXPECT_DOUBLE_EQ(rows[1].beta, 2.0);
}

TEST(McmcGenerate, StrongOfSelectionFindsTheFifth) {
  GeneratorConfig c;
  c.n_steps = 5;
  c.octave = true;
  c.beta = 100.0;
  c.population_size = 2000;
  c.n_repeats = 4;
  c.seed = 3;
  const auto pop = mcmc_generate(CostModel::harmony(HarmonicityModel{}), c);
  std::size_t hits = 0;
  // Octave costs do not depend on which degree is the root, so look for the fifth
  // between any two degrees.
  for (const auto& s : pop.scales) {
    const auto iv = interval_set(s).intervals;
    hits += std::any_of(iv.begin(), iv.end(), [](double x) { return std::abs(x - 702.0) <= 25.0; }) ? 1 : 0;
  }
  EXPECT_GE(static_cast<double>(hits) / static_cast<double>(pop.size()), 0.8);
}
