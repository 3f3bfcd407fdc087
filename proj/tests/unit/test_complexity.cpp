#include <gtest/gtest.h>

#include <algorithm>

#include "oracles/oracles.hpp"
#include "scalevo/complexity.hpp"
#include "scalevo/rng.hpp"

using namespace scalevo;

TEST(WardCategories, SmallExamples) {
  const std::vector<double> close{0, 30, 60};
  EXPECT_EQ(ward_categories(close, 25.0).k, 1u);  // variance 600 < 625
  EXPECT_EQ(ward_categories(close, 24.0).k, 2u);
  const std::vector<double> single{500};
  EXPECT_EQ(ward_categories(single, 1.0).k, 1u);
  const std::vector<double> two_groups{100, 102, 98, 700, 701, 699};
  const auto r = ward_categories(two_groups, 10.0);
  EXPECT_EQ(r.k, 2u);
  EXPECT_EQ(r.assignment, (std::vector<std::size_t>{0, 0, 0, 1, 1, 1}));
}

TEST(WardCategories, RejectsBadInput) {
  EXPECT_THROW(ward_categories(std::vector<double>{}, 10.0), ValidationError);
  EXPECT_THROW(ward_categories(std::vector<double>{1.0}, 0.0), ValidationError);
}

TEST(WardCategories, NeverBelowBruteForceMinimum) {
  Rng rng(7);
  for (int trial = 0; trial < 150; ++trial) {
    const std::size_t n = 2 + rng.index(7);
    std::vector<double> v(n);
    for (auto& x : v) x = rng.uniform(0.0, 400.0);
    const double w = rng.uniform(5.0, 80.0);
    const auto r = ward_categories(v, w);
    EXPECT_GE(r.k, oracle::min_categories(v, w));
    EXPECT_LT(r.max_within_var, w * w);
  }
}

TEST(WardCategories, PermutationInvariant) {
  Rng rng(11);
  std::vector<double> v(12);
  for (auto& x : v) x = std::round(rng.uniform(0.0, 1200.0));
  const auto base = ward_categories(v, 30.0).k;
  for (int i = 0; i < 20; ++i) {
    rng.shuffle(std::span<double>(v));
    EXPECT_EQ(ward_categories(v, 30.0).k, base);
  }
}

TEST(WardCategories, MonotoneInW) {
  Rng rng(3);
  std::vector<double> v(15);
  for (auto& x : v) x = rng.uniform(0.0, 1200.0);
  std::size_t prev = v.size() + 1;
  for (double w = 1.0; w < 600.0; w *= 1.3) {
    const auto k = ward_categories(v, w).k;
    EXPECT_LE(k, prev);
    prev = k;
  }
  EXPECT_EQ(ward_categories(v, 1e6).k, 1u);
}

TEST(ComplexityCost, EqualTemperedAndPresets) {
  // Five equal steps: circular intervals take four distinct values, 240 to 960.
  const Scale eq({240, 240, 240, 240, 240}, ScaleType::Theory, "synthetic", true);
  EXPECT_EQ(complexity_cost(eq, 2.0), 4u);
  EXPECT_EQ(default_complexity_w(ScaleType::Vocal), 18.0);
  EXPECT_EQ(default_complexity_w(ScaleType::Instrumental), 14.0);
  EXPECT_EQ(default_complexity_w(ScaleType::Theory), 2.0);
  EXPECT_EQ(complexity_cost(eq), complexity_cost(eq, 2.0));
  const Scale uneven({200, 180, 220});
  EXPECT_EQ(step_categories(uneven, 25.0), 1u);
  EXPECT_GE(complexity_cost(uneven, 2.0), complexity_cost(uneven, 25.0));
  EXPECT_THROW(complexity_cost(Scale({1300.0}), 10.0), ValidationError);
}

TEST(WardCategories, MoreExamples) {
  EXPECT_EQ(ward_categories(std::vector<double>{200, 200, 200}, 25.0).k, 1u);
  EXPECT_EQ(ward_categories(std::vector<double>{100, 102, 200, 203}, 25.0).k, 2u);
  EXPECT_EQ(ward_categories(std::vector<double>{100, 150, 200}, 20.0).k, 3u);
  const Scale major({200, 200, 100, 200, 200, 200, 100}, ScaleType::Theory);
  EXPECT_EQ(complexity_cost(major, 2.0), 11u);
  const Scale equi({240, 240, 240, 240, 240}, ScaleType::Theory);
  EXPECT_EQ(complexity_cost(equi, 25.0), 4u);
}
