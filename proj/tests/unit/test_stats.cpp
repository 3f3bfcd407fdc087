#include <gtest/gtest.h>

#include <cmath>

#include "scalevo/rng.hpp"
#include "scalevo/stats.hpp"

using namespace scalevo;

TEST(Jsd, SymmetricBoundedAndZeroOnEqual) {
  const std::vector<double> p{0.2, 0.3, 0.5}, q{0.5, 0.4, 0.1};
  EXPECT_DOUBLE_EQ(jensen_shannon(p, p), 0.0);
  EXPECT_NEAR(jensen_shannon(p, q), jensen_shannon(q, p), 1e-15);
  EXPECT_GT(jensen_shannon(p, q), 0.0);
  EXPECT_NEAR(jensen_shannon(std::vector<double>{1, 0}, std::vector<double>{0, 1}), std::log(2.0), 1e-12);
}

TEST(LogMeanExp, StableForLargeMagnitudes) {
  const std::vector<double> xs{-1000.0, -1000.0};
  EXPECT_NEAR(log_mean_exp(xs).value, -1000.0, 1e-12);
  const std::vector<double> ys{0.0, std::log(3.0)};
  EXPECT_NEAR(log_mean_exp(ys).value, std::log(2.0), 1e-12);
  const double inf = std::numeric_limits<double>::infinity();
  EXPECT_THROW(log_mean_exp(std::vector<double>{-inf, -inf}), NumericalError);
}

TEST(Binomial, TailValues) {
  EXPECT_NEAR(binomial_upper_tail(4, 4, 0.5), 0.0625, 1e-15);
  EXPECT_NEAR(binomial_lower_tail(0, 4, 0.5), 0.0625, 1e-15);
  // scipy.stats.binom.sf(2, 10, 0.1)
  EXPECT_NEAR(binomial_upper_tail(3, 10, 0.1), 0.07019082639999985, 1e-12);
}

TEST(BenjaminiHochberg, StepUp) {
  const std::vector<double> all{0.01, 0.02, 0.03, 0.04, 0.05};
  const auto r = benjamini_hochberg(all, 0.05);
  for (bool b : r.rejected) EXPECT_TRUE(b);
  const std::vector<double> some{0.001, 0.2, 0.03, 0.9};
  const auto s = benjamini_hochberg(some, 0.05);
  EXPECT_TRUE(s.rejected[0]);
  EXPECT_FALSE(s.rejected[1]);
  EXPECT_FALSE(s.rejected[2]);
  EXPECT_NEAR(s.adjusted[0], 0.004, 1e-12);
}

TEST(Rng, DeterministicAndDerivedStreamsDiffer) {
  Rng a(42), b(42), c(derive_seed(42, 1));
  for (int i = 0; i < 10; ++i) {
    const double x = a.uniform();
    EXPECT_EQ(x, b.uniform());
    EXPECT_GE(x, 0.0);
    EXPECT_LT(x, 1.0);
  }
  EXPECT_NE(Rng(derive_seed(42, 0)).uniform(), c.uniform());
}

TEST(Rng, NormalMoments) {
  Rng r(7);
  double s = 0, s2 = 0;
  const int n = 200000;
  for (int i = 0; i < n; ++i) {
    const double x = r.normal();
    s += x;
    s2 += x * x;
  }
  EXPECT_NEAR(s / n, 0.0, 0.01);
  EXPECT_NEAR(s2 / n, 1.0, 0.01);
}

TEST(LogGrid, Endpoints) {
  const auto g = log_grid(1e-2, 1e4, 25);
  ASSERT_EQ(g.size(), 25u);
  EXPECT_NEAR(g.front(), 1e-2, 1e-15);
  EXPECT_NEAR(g.back(), 1e4, 1e-9);
  EXPECT_NEAR(g[9], std::pow(10.0, 0.25), 1e-12);
}
