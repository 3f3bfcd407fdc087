#include <gtest/gtest.h>

#include <algorithm>

#include "scalevo/scale.hpp"

using namespace scalevo;

namespace {
std::vector<double> sorted(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  return v;
}
}  // namespace

TEST(DegreesFromSteps, Examples) {
  EXPECT_EQ(degrees_from_steps(std::vector<double>{200}).degrees, (std::vector<double>{0, 200}));
  EXPECT_EQ(degrees_from_steps(std::vector<double>{200, 200, 100}).degrees, (std::vector<double>{0, 200, 400, 500}));
  EXPECT_EQ(degrees_from_steps(std::vector<double>{500, 200, 500}).degrees, (std::vector<double>{0, 500, 700, 1200}));
}

TEST(DegreesFromSteps, RejectsNonPositiveStep) {
  EXPECT_THROW(degrees_from_steps(std::vector<double>{200, 0}), ValidationError);
  EXPECT_THROW(degrees_from_steps(std::vector<double>{-5}), ValidationError);
}

TEST(ScaleType, OctaveScalesMustSumToOctave) {
  EXPECT_NO_THROW(Scale({500, 700}, ScaleType::Theory, "Western", true));
  EXPECT_THROW(Scale({500, 600}, ScaleType::Theory, "Western", true), ValidationError);
  EXPECT_NO_THROW(Scale({500, 700 + 0.5e-6}, ScaleType::Theory, "Western", true));
  EXPECT_THROW(Scale({}, ScaleType::Vocal, "Africa", false), ValidationError);
  EXPECT_THROW(Scale({100, -1}, ScaleType::Vocal, "Africa", false), ValidationError);
}

TEST(ScaleType, TheoryDefaultsToOctave) {
  EXPECT_TRUE(Scale({600, 600}, ScaleType::Theory).octave());
  EXPECT_FALSE(Scale({600, 600}, ScaleType::Vocal).octave());
  EXPECT_DOUBLE_EQ(Scale({100, 250, 300}).range(), 650.0);
  EXPECT_EQ(Scale({100, 250, 300}).n_steps(), 3u);
}

TEST(ScaleType, ParseAndRegions) {
  EXPECT_EQ(parse_scale_type("Instrumental"), ScaleType::Instrumental);
  EXPECT_THROW(parse_scale_type("Chant"), ValidationError);
  EXPECT_EQ(default_regions().size(), 12u);
  EXPECT_TRUE(is_known_region("synthetic"));
  EXPECT_FALSE(is_known_region("Atlantis"));
}

TEST(IntervalSet, Examples) {
  EXPECT_EQ(sorted(interval_set(std::vector<double>{500, 700}, IntervalMode::NonOctave).intervals),
            (std::vector<double>{500, 700, 1200}));
  EXPECT_EQ(sorted(interval_set(std::vector<double>{500, 700}, IntervalMode::Octave).intervals),
            (std::vector<double>{500, 700}));
  EXPECT_EQ(sorted(interval_set(std::vector<double>{400, 300, 500}, IntervalMode::Octave).intervals),
            (std::vector<double>{300, 400, 500, 700, 800, 900}));
}

TEST(IntervalSet, CountsFollowConstruction) {
  for (std::size_t n = 1; n <= 9; ++n) {
    std::vector<double> steps(n, 1200.0 / static_cast<double>(n));
    EXPECT_EQ(interval_set(steps, IntervalMode::NonOctave).size(), n * (n + 1) / 2);
    EXPECT_EQ(interval_set(steps, IntervalMode::Octave).size(), n * (n - 1));
  }
}

TEST(IntervalSet, OctaveIntervalsAreBelowOctaveAndPositive) {
  const Scale s({200, 200, 100, 200, 200, 200, 100}, ScaleType::Theory);
  for (double v : interval_set(s).intervals) {
    EXPECT_GT(v, 0.0);
    EXPECT_LT(v, 1200.0);
  }
}

TEST(IntervalSet, OctaveModeIsRotationInvariant) {
  const std::vector<double> a{200, 200, 100, 200, 200, 200, 100};
  auto b = a;
  std::rotate(b.begin(), b.begin() + 3, b.end());
  EXPECT_EQ(sorted(interval_set(a, IntervalMode::Octave).intervals),
            sorted(interval_set(b, IntervalMode::Octave).intervals));
}

TEST(IntervalSet, FilterDropsAbove1250) {
  const Scale s({700, 700, 700}, ScaleType::Vocal);
  const auto f = scored_intervals(s);
  EXPECT_EQ(sorted(f.intervals), (std::vector<double>{700, 700, 700}));
  EXPECT_TRUE(scored_intervals(Scale({1300.0})).empty());
}
