#include <gtest/gtest.h>

#include <fstream>
#include <sstream>

#include "scalevo/io.hpp"
#include "support/temp_dir.hpp"

using namespace scalevo;

TEST(Fmt, RoundTripsDoubles) {
  for (double v : {0.1, 1.0 / 3.0, 1e-300, 702.0, -5.5}) EXPECT_EQ(std::stod(io::fmt(v)), v);
  EXPECT_EQ(io::fmt(std::numeric_limits<double>::quiet_NaN()), "nan");
}

TEST(Csv, ParseErrorsNameTheLine) {
  std::istringstream in("a,b\n1,2\n3\n");
  try {
    io::parse_csv(in, "x.csv");
    FAIL() << "expected a DataError";
  } catch (const DataError& e) {
    EXPECT_NE(std::string(e.what()).find("x.csv:3"), std::string::npos);
  }
  std::istringstream empty("");
  EXPECT_THROW(io::parse_csv(empty, "e.csv"), DataError);
  EXPECT_THROW(io::read_csv("/nonexistent/file.csv"), DataError);
}

TEST(Scales, RoundTrip) {
  test_support::TempDir dir("io");
  const std::vector<Scale> scales{Scale({200.5, 300.25}, ScaleType::Vocal, "Africa", false, "a"),
                                  Scale({400, 400, 400}, ScaleType::Theory, "Western", true, "b")};
  io::write_scales(dir.file("s.csv"), scales);
  const auto back = io::read_scales(dir.file("s.csv"));
  ASSERT_EQ(back.size(), 2u);
  EXPECT_EQ(back[0].steps(), scales[0].steps());
  EXPECT_EQ(back[1].octave(), true);
  EXPECT_EQ(back[1].type(), ScaleType::Theory);
  EXPECT_EQ(back[0].region(), "Africa");
  EXPECT_EQ(back[0].id(), "a");
}

TEST(Scales, BadRowsAreDataErrors) {
  auto parse = [](const std::string& body) {
    std::istringstream in("id,scale_type,region,octave,steps_cents\n" + body);
    return io::scales_from_csv(io::parse_csv(in, "t.csv"));
  };
  EXPECT_THROW(parse("a,Vocal,Atlantis,0,100\n"), DataError);
  EXPECT_THROW(parse("a,Vocal,Africa,0,100;-5\n"), DataError);
  EXPECT_THROW(parse("a,Vocal,Africa,1,100;200\n"), DataError);
  EXPECT_THROW(parse("a,Vocal,Africa,0,abc\n"), DataError);
  EXPECT_TRUE(parse("").empty());
}

TEST(StepDistributionIo, RoundTrip) {
  test_support::TempDir dir("io");
  const StepDistribution d({0, 100, 250}, {0.25, 0.75});
  io::write_step_distribution(dir.file("d.csv"), d);
  const auto back = io::read_step_distribution(dir.file("d.csv"));
  EXPECT_EQ(back.edges(), d.edges());
  EXPECT_EQ(back.probabilities(), d.probabilities());
}

TEST(PitchTrackIo, RoundTrip) {
  test_support::TempDir dir("io");
  const PitchTrack t{{0.0, 0.01, 0.02}, {100.0, 101.5, 0.0}, {true, true, false}};
  io::write_pitch_track(dir.file("p.csv"), t);
  const auto back = io::read_pitch_track(dir.file("p.csv"));
  EXPECT_EQ(back.times, t.times);
  EXPECT_EQ(back.cents, t.cents);
  EXPECT_EQ(back.voiced, t.voiced);
}

TEST(CorpusIo, RoundTripAndValidation) {
  test_support::TempDir dir("io");
  CorpusHistogram h;
  for (std::size_t b = 0; b < CorpusHistogram::kBins; ++b) h.counts[b] = static_cast<double>(20 - b);
  io::write_corpus(dir.file("c.csv"), h);
  EXPECT_EQ(io::read_corpus(dir.file("c.csv")).counts, h.counts);
  std::ofstream(dir.file("bad.csv")) << "semitone_bin,count\n15,3\n";
  EXPECT_THROW(io::read_corpus(dir.file("bad.csv")), DataError);
}

TEST(KeyValues, ParseAndCompare) {
  std::istringstream in("# comment\nmodel = of\nseed=3\n\n");
  const auto kv = io::parse_key_values(in, "cfg");
  EXPECT_EQ(kv.at("model"), "of");
  EXPECT_EQ(kv.at("seed"), "3");
  std::istringstream bad("novalue\n");
  EXPECT_THROW(io::parse_key_values(bad, "cfg"), DataError);
  auto a = kv, b = kv;
  a["created_at"] = "x";
  b["created_at"] = "y";
  EXPECT_EQ(io::comparable(a), io::comparable(b));
}
