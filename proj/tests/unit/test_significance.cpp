#include <gtest/gtest.h>

#include "scalevo/melody.hpp"
#include "scalevo/significance.hpp"
#include "scalevo/weighting.hpp"

using namespace scalevo;

TEST(BinomialDirection, TailsAndTies) {
  std::string dir;
  EXPECT_NEAR(binomial_direction_p(3, 10, 0.1, &dir), 0.0701908264, 1e-10);
  EXPECT_EQ(dir, "frequent");
  EXPECT_NEAR(binomial_direction_p(0, 10, 0.1, &dir), std::pow(0.9, 10), 1e-14);
  EXPECT_EQ(dir, "rare");
  binomial_direction_p(1, 10, 0.1, &dir);
  EXPECT_EQ(dir, "neutral");
  // 4 of 4 at p = 1/2 in the frequent direction.
  EXPECT_NEAR(binomial_direction_p(4, 4, 0.5), 0.0625, 1e-15);
}

TEST(IntervalSignificance, IdenticalSetsAreNotSignificant) {
  std::vector<Scale> scales;
  for (int i = 0; i < 10; ++i) scales.push_back(Scale({200.0 + i, 300.0}));
  const auto sets = interval_sets(scales);
  const auto r = interval_significance(sets, sets, 20.0);
  EXPECT_EQ(r.total_intervals, 30);
  EXPECT_EQ(r.n_significant(), 0u);
  for (const auto& b : r.bins) EXPECT_EQ(b.direction, "neutral");
}

TEST(IntervalSignificance, DetectsInjectedInterval) {
  Rng rng(4);
  const auto dist = melody_distribution(melody_presets::kConstrained);
  std::vector<Scale> emp;
  for (int i = 0; i < 200; ++i) {
    const double s1 = rng.uniform(250.0, 450.0);
    emp.push_back(Scale({s1, 702.0 - s1}));
  }
  const auto null = melody_null_sets(emp, dist, 50, rng);
  EXPECT_EQ(null.size(), 200u * 50u);
  const auto r = interval_significance(interval_sets(emp), null, 20.0);
  const auto& b700 = r.bins[35];
  EXPECT_DOUBLE_EQ(b700.bin_low, 700.0);
  EXPECT_TRUE(b700.significant);
  EXPECT_EQ(b700.direction, "frequent");
  EXPECT_LE(b700.p, b700.p_adjusted);
}

TEST(IntervalSignificance, Validation) {
  const std::vector<IntervalSet> none;
  const std::vector<IntervalSet> one{interval_set(Scale({100.0}))};
  EXPECT_THROW(interval_significance(none, one), ValidationError);
  EXPECT_THROW(interval_significance(one, none), ValidationError);
  EXPECT_THROW(interval_significance(one, one, 0.0), ValidationError);
}

TEST(Weighting, GiniAndCaps) {
  const std::vector<double> two{1.0, 3.0};
  EXPECT_DOUBLE_EQ(gini(two), 0.25);
  const std::vector<double> equal{5.0, 5.0, 5.0};
  EXPECT_DOUBLE_EQ(gini(equal), 0.0);
  const std::vector<double> counts{50.0, 3.0};
  EXPECT_EQ(capped_counts(counts, 20.0), (std::vector<double>{20.0, 3.0}));
  EXPECT_THROW(gini(std::vector<double>{}), ValidationError);
}

TEST(Weighting, RegionWeightsAndBootstrap) {
  std::vector<Scale> scales;
  for (int i = 0; i < 30; ++i) scales.push_back(Scale({200.0}, ScaleType::Vocal, "Africa"));
  for (int i = 0; i < 4; ++i) scales.push_back(Scale({200.0}, ScaleType::Vocal, "Oceania"));
  const auto w = region_weights(scales, 20);
  EXPECT_DOUBLE_EQ(w.front(), 1.0 / 20.0);
  EXPECT_DOUBLE_EQ(w.back(), 1.0 / 4.0);
  EXPECT_EQ(region_counts(scales).at("Africa"), 30u);
  Rng rng(1);
  const auto idx = bootstrap_regions(scales, 20, rng);
  EXPECT_EQ(idx.size(), 24u);
  EXPECT_TRUE(std::is_sorted(idx.begin(), idx.end()));
  EXPECT_TRUE(std::adjacent_find(idx.begin(), idx.end()) == idx.end());
}
