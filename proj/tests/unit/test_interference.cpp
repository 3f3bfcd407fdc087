#include <gtest/gtest.h>

#include <cmath>

#include "scalevo/interference.hpp"

using namespace scalevo;

namespace {
double cents_to_hz(double c) { return kDefaultRootHz * std::exp2(c / 1200.0); }

const Timbre& ten() {
  static const Timbre t = Timbre::harmonic(10, 1.0);
  return t;
}

std::vector<InterferenceModel> all_models() {
  InterferenceModel hk, s, b;
  s.kind = InterferenceKind::S;
  b.kind = InterferenceKind::B;
  return {hk, s, b};
}
}  // namespace

TEST(Timbre, HarmonicAmplitudes) {
  const auto t = Timbre::harmonic(4, 1.0);
  ASSERT_EQ(t.n_partials(), 4u);
  EXPECT_DOUBLE_EQ(t.amplitudes[3], 0.25);
  EXPECT_THROW(Timbre::harmonic(0), ValidationError);
}

TEST(DissonanceHk, Examples) {
  const auto one = Timbre::harmonic(1);
  EXPECT_DOUBLE_EQ(dissonance_hk(300, 300, one, 1.359, false), 0.0);
  EXPECT_DOUBLE_EQ(dissonance_hk(300, 300, one), 0.0);
  // Raw bandwidth distance, single pair at f2 = 2 f1 (mpmath): f1 / (1.72 (1.5 f1)^0.65).
  EXPECT_NEAR(dissonance_hk(261.6, 523.2, one, 1.359, false), 3.13462392185564627376792016132, 1e-11);
  EXPECT_GT(dissonance_hk(cents_to_hz(0), cents_to_hz(100), ten()),
            dissonance_hk(cents_to_hz(0), cents_to_hz(1200), ten()));
}

TEST(DissonanceSethares, Examples) {
  const auto one = Timbre::harmonic(1);
  EXPECT_DOUBLE_EQ(dissonance_sethares(440, 440, one), 0.0);
  EXPECT_LT(dissonance_sethares(cents_to_hz(0), cents_to_hz(1200), ten()),
            dissonance_sethares(cents_to_hz(0), cents_to_hz(600), ten()));
  EXPECT_LT(dissonance_sethares(100, 100000, one), 1e-100);
}

TEST(DissonanceBerezovsky, Examples) {
  const auto one = Timbre::harmonic(1);
  EXPECT_DOUBLE_EQ(dissonance_berezovsky(440, 440, one), 0.0);
  EXPECT_GT(dissonance_berezovsky(cents_to_hz(0), cents_to_hz(50), ten()),
            dissonance_berezovsky(cents_to_hz(0), cents_to_hz(700), ten()));
  // At |log2 ratio| = w_c the kernel peaks at 1.
  const double f = 300.0;
  const double wc = 0.67 * std::pow(f, -0.68);
  EXPECT_NEAR(dissonance_berezovsky(f, f * std::exp2(wc), one), 1.0, 1e-12);
}

TEST(Dissonance, SymmetricAndNonNegative) {
  for (const auto& m : all_models()) {
    for (double c : {13.0, 100.0, 386.0, 702.0, 1111.0}) {
      const double a = dissonance(m, 200.0, 200.0 * std::exp2(c / 1200.0), ten());
      const double b = dissonance(m, 200.0 * std::exp2(c / 1200.0), 200.0, ten());
      EXPECT_NEAR(a, b, 1e-12 * std::max(1.0, a)) << m.name() << " " << c;
      EXPECT_GE(a, 0.0);
    }
  }
}

TEST(DissonanceTable, LocalMinimaNearFifthAndOctave) {
  for (const auto& m : all_models()) {
    const auto t = dissonance_table(m, ten());
    for (int target : {702, 1200}) {
      bool found = false;
      for (int c = target - 25; c <= std::min(target + 25, 1249); ++c) {
        if (t.raw_at(c) <= t.raw_at(c - 1) && t.raw_at(c) <= t.raw_at(c + 1)) found = true;
      }
      if (target == 1200 && !found) found = t.raw_at(1250) <= t.raw_at(1249);
      EXPECT_TRUE(found) << m.name() << " near " << target;
    }
  }
}

TEST(InterferenceCost, FifthBeatsTritoneAndOctaveBeatsSeventh) {
  for (const auto& m : all_models()) {
    const auto t = dissonance_table(m, ten());
    EXPECT_LT(interference_cost(Scale({702.0}), t), interference_cost(Scale({600.0}), t)) << m.name();
    EXPECT_LT(t.z_at(1200), t.z_at(1100)) << m.name();
    EXPECT_NEAR(interference_cost(Scale({1200.0}), t), t.z_at(1200), 1e-12);
    EXPECT_THROW(interference_cost(Scale({1300.0}), t), ValidationError);
  }
}

TEST(InterferenceModel, Validation) {
  InterferenceModel m;
  m.r = 0.0;
  EXPECT_THROW(dissonance_table(m), ValidationError);
  EXPECT_THROW(dissonance_hk(0.0, 100.0, ten()), ValidationError);
}
