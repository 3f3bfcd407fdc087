#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>

#include "scalevo/harmonicity.hpp"

using namespace scalevo;

namespace {
const NormalizedScoreTable& of_table() {
  static const auto t = normalize_scores(HarmonicityModel{});
  return t;
}
}  // namespace

TEST(HGp, SimpleRatios) {
  EXPECT_DOUBLE_EQ(h_gp(1200, 20), 2.0);
  EXPECT_DOUBLE_EQ(h_gp(702, 20), 1.0);
  EXPECT_DOUBLE_EQ(h_gp(0, 20), 3.0);
  // 5/4 = 386.3 cents: (5 + 4 + 1) / 20.
  EXPECT_DOUBLE_EQ(h_gp(386, 5), 0.5);
}

TEST(HGp, NoFractionInWindowGivesZero) {
  // With a 1-cent window and denominators up to 2 nothing lies near 350 cents.
  EXPECT_DOUBLE_EQ(h_gp(350, 1, 2), 0.0);
}

TEST(HGp, SameBestFractionSameScore) {
  EXPECT_DOUBLE_EQ(h_gp(1195, 20), h_gp(1210, 20));
  EXPECT_DOUBLE_EQ(h_gp(695, 20), h_gp(710, 20));
}

TEST(HOf, KernelValues) {
  EXPECT_NEAR(h_of(1200, 20), 1.0 + std::exp(-498.0 * 498.0 / 800.0), 1e-15);
  EXPECT_NEAR(h_of(702, 20), 1.0, 1e-15);
  EXPECT_LT(h_of(951, 20), 1e-30);
}

TEST(HHp, MatchesGridOracle) {
  // Literal 1-cent-grid template construction, cosine similarity maximised over
  // integer fundamentals (numpy reference).
  const HarmonicTemplate t(10, 1.0);
  EXPECT_NEAR(t.score(0), 1.0, 1e-12);
  EXPECT_NEAR(t.score(600), 0.7091576711563112, 1e-9);
  EXPECT_NEAR(t.score(702), 0.7570919548046554, 1e-9);
  EXPECT_NEAR(t.score(1200), 0.8579636870432422, 1e-9);
  EXPECT_NEAR(t.score(386), 0.7212171746465985, 1e-9);
}

TEST(HHp, OctaveAboveTritoneAndFifthLocalMax) {
  const HarmonicTemplate t(10, 1.0);
  EXPECT_GT(t.score(1200), t.score(600));
  int best = 650;
  for (int c = 650; c <= 750; ++c) {
    if (t.score(c) > t.score(best)) best = c;
  }
  EXPECT_EQ(best, 702);
  EXPECT_GT(t.score(0), t.score(702));
}

TEST(HHp, PureToneLimit) {
  // With rho large only the fundamental is left: two separated tones never fit
  // one template better than 1/sqrt(2), whatever their interval.
  const HarmonicTemplate t(10, 60.0);
  for (int c = 100; c <= 1250; c += 50) EXPECT_NEAR(t.score(c), 1.0 / std::sqrt(2.0), 1e-9);
  EXPECT_NEAR(t.score(0), 1.0, 1e-12);
}

TEST(HHp, FractionalIntervalAgreesWithNeighbours) {
  const HarmonicTemplate t(6, 1.0);
  const double mid = t.score(701.5);
  EXPECT_GE(mid, std::min(t.score(701), t.score(702)) - 1e-3);
  EXPECT_LE(mid, std::max(t.score(701), t.score(702)) + 1e-3);
}

TEST(NormalizeScores, ZeroMeanUnitStd) {
  for (auto kind : {HarmonicityKind::OF, HarmonicityKind::GP, HarmonicityKind::HP}) {
    HarmonicityModel m;
    m.kind = kind;
    const auto t = normalize_scores(m);
    double s = 0, s2 = 0;
    for (double z : t.z()) {
      s += z;
      s2 += z * z;
    }
    EXPECT_NEAR(s / 1251.0, 0.0, 1e-9);
    EXPECT_NEAR(std::sqrt(s2 / 1251.0), 1.0, 1e-9);
  }
}

TEST(NormalizeScores, OfArgmaxAndFarPoint) {
  const auto& t = of_table();
  const auto z = t.z();
  const auto argmax = static_cast<int>(std::max_element(z.begin(), z.end()) - z.begin());
  EXPECT_TRUE(argmax == 702 || argmax == 1200);
  EXPECT_LT(t.z_at(951), 0.0);
}

TEST(NormalizeScores, ConstantTableIsAnError) {
  EXPECT_THROW(NormalizedScoreTable::from_function("flat", [](double) { return 1.0; }), NumericalError);
}

TEST(NormalizeScores, ModelValidation) {
  HarmonicityModel m;
  m.w = 0.5;
  EXPECT_THROW(normalize_scores(m), ValidationError);
  m = HarmonicityModel{};
  m.kind = HarmonicityKind::HP;
  m.n = 0;
  EXPECT_THROW(normalize_scores(m), ValidationError);
}

TEST(HarmonyCost, FifthFourthBeatsTritones) {
  const auto& t = of_table();
  const Scale a({702, 498});
  const Scale b({600, 600});
  EXPECT_NEAR(harmony_cost(a, t), -(t.z_at(702) + t.z_at(498) + t.z_at(1200)) / 3.0, 1e-12);
  EXPECT_LT(harmony_cost(a, t), harmony_cost(b, t));
  EXPECT_NEAR(harmony_cost(Scale({1200.0}), t), -t.z_at(1200), 1e-12);
  EXPECT_THROW(harmony_cost(Scale({1300.0}), t), ValidationError);
}

TEST(HarmonyCost, AffineInvariance) {
  const auto& t = of_table();
  std::vector<double> raw(t.raw().begin(), t.raw().end());
  for (double& r : raw) r = 3.5 * r + 11.0;
  const auto t2 = NormalizedScoreTable::from_raw("scaled", raw);
  const Scale s({200, 150, 350, 100});
  EXPECT_NEAR(harmony_cost(s, t), harmony_cost(s, t2), 1e-12);
}

TEST(HarmonyCost, OctaveRotationInvariance) {
  const auto& t = of_table();
  std::vector<double> steps{200, 200, 100, 200, 200, 200, 100};
  const double c0 = harmony_cost(Scale(steps, ScaleType::Theory), t);
  for (int r = 1; r < 7; ++r) {
    std::rotate(steps.begin(), steps.begin() + 1, steps.end());
    EXPECT_NEAR(harmony_cost(Scale(steps, ScaleType::Theory), t), c0, 1e-12);
  }
}

TEST(ScoreTable, GridLookupRounds) {
  const auto& t = of_table();
  EXPECT_DOUBLE_EQ(t.z_at(701.6), t.z_at(702));
  EXPECT_DOUBLE_EQ(t.z_at(1250.4), t.z_at(1250));
  EXPECT_THROW(t.z_at(1251), ValidationError);
}
