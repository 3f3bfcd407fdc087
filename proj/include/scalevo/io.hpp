#pragma once

#include <charconv>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

#include "scalevo/comparison.hpp"
#include "scalevo/error.hpp"
#include "scalevo/extraction.hpp"
#include "scalevo/generator.hpp"
#include "scalevo/melody.hpp"
#include "scalevo/scale.hpp"
#include "scalevo/score_table.hpp"
#include "scalevo/significance.hpp"
#include "scalevo/step_distribution.hpp"

namespace scalevo::io {

/// Shortest text that parses back to the same double.
inline std::string fmt(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

inline std::string fmt(std::size_t v) { return std::to_string(v); }
inline std::string fmt(long v) { return std::to_string(v); }
inline std::string fmt(int v) { return std::to_string(v); }
inline std::string fmt_bool(bool v) { return v ? "1" : "0"; }

inline std::string_view trim(std::string_view s) {
  const auto a = s.find_first_not_of(" \t\r\n");
  if (a == std::string_view::npos) return {};
  const auto b = s.find_last_not_of(" \t\r\n");
  return s.substr(a, b - a + 1);
}

inline std::vector<std::string> split(std::string_view s, char sep) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = s.find(sep, start);
    out.emplace_back(trim(s.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start)));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

/// Position of a record for error messages.
struct Where {
  std::string path;
  std::size_t line = 0;
  std::string str() const { return path + ":" + std::to_string(line); }
};

inline double parse_double(std::string_view s, const Where& where, std::string_view field) {
  s = trim(s);
  if (s == "nan") return std::nan("");
  if (s == "inf") return INFINITY;
  if (s == "-inf") return -INFINITY;
  double v = 0.0;
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size()) {
    throw DataError(where.str() + ": field '" + std::string(field) + "' is not a number: '" + std::string(s) + "'");
  }
  return v;
}

inline long parse_long(std::string_view s, const Where& where, std::string_view field) {
  s = trim(s);
  long v = 0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size()) {
    throw DataError(where.str() + ": field '" + std::string(field) + "' is not an integer: '" + std::string(s) + "'");
  }
  return v;
}

inline bool parse_bool(std::string_view s, const Where& where, std::string_view field) {
  s = trim(s);
  if (s == "1" || s == "true" || s == "True") return true;
  if (s == "0" || s == "false" || s == "False") return false;
  throw DataError(where.str() + ": field '" + std::string(field) + "' is not a boolean: '" + std::string(s) + "'");
}

/// A headed CSV file held in memory. Blank lines and lines starting with '#' are skipped.
struct CsvTable {
  std::string path;
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
  std::vector<std::size_t> lines;

  std::size_t column(std::string_view name) const {
    for (std::size_t i = 0; i < header.size(); ++i) {
      if (header[i] == name) return i;
    }
    throw DataError(path + ": missing column '" + std::string(name) + "'");
  }
  Where where(std::size_t row) const { return {path, lines[row]}; }
};

inline CsvTable parse_csv(std::istream& in, std::string path) {
  CsvTable t;
  t.path = std::move(path);
  std::string line;
  std::size_t lineno = 0;
  bool have_header = false;
  while (std::getline(in, line)) {
    ++lineno;
    const auto s = trim(line);
    if (s.empty() || s.front() == '#') continue;
    auto fields = split(s, ',');
    if (!have_header) {
      t.header = std::move(fields);
      have_header = true;
      continue;
    }
    if (fields.size() != t.header.size()) {
      throw DataError(t.path + ":" + std::to_string(lineno) + ": expected " + std::to_string(t.header.size()) +
                      " fields, found " + std::to_string(fields.size()));
    }
    t.rows.push_back(std::move(fields));
    t.lines.push_back(lineno);
  }
  if (!have_header) throw DataError(t.path + ": file is empty (no header row)");
  return t;
}

inline CsvTable read_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError(path + ": cannot open file");
  return parse_csv(in, path);
}

inline std::ofstream open_out(const std::string& path) {
  const auto parent = std::filesystem::path(path).parent_path();
  if (!parent.empty()) std::filesystem::create_directories(parent);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError(path + ": cannot open file for writing");
  return out;
}

// ---- scales -------------------------------------------------------------

inline std::string join_steps(const std::vector<double>& steps) {
  std::string s;
  for (std::size_t i = 0; i < steps.size(); ++i) {
    if (i) s += ';';
    s += fmt(steps[i]);
  }
  return s;
}

inline std::vector<Scale> scales_from_csv(const CsvTable& t) {
  const auto c_id = t.column("id"), c_type = t.column("scale_type"), c_region = t.column("region"),
             c_oct = t.column("octave"), c_steps = t.column("steps_cents");
  std::vector<Scale> out;
  for (std::size_t r = 0; r < t.rows.size(); ++r) {
    const auto& row = t.rows[r];
    const auto w = t.where(r);
    std::vector<double> steps;
    for (const auto& f : split(row[c_steps], ';')) steps.push_back(parse_double(f, w, "steps_cents"));
    try {
      if (!is_known_region(row[c_region])) throw ValidationError("unknown region '" + row[c_region] + "'");
      out.emplace_back(std::move(steps), parse_scale_type(row[c_type]), row[c_region], parse_bool(row[c_oct], w, "octave"),
                       row[c_id]);
    } catch (const ValidationError& e) {
      throw DataError(w.str() + ": " + e.what());
    }
  }
  return out;
}

inline std::vector<Scale> read_scales(const std::string& path) { return scales_from_csv(read_csv(path)); }

inline void write_scales(std::ostream& out, std::span<const Scale> scales, std::span<const double> costs = {}) {
  out << "id,scale_type,region,octave,steps_cents" << (costs.empty() ? "" : ",cost") << '\n';
  for (std::size_t i = 0; i < scales.size(); ++i) {
    const auto& s = scales[i];
    out << (s.id().empty() ? "s" + std::to_string(i) : s.id()) << ',' << to_string(s.type()) << ',' << s.region() << ','
        << fmt_bool(s.octave()) << ',' << join_steps(s.steps());
    if (!costs.empty()) out << ',' << fmt(costs[i]);
    out << '\n';
  }
}

inline void write_scales(const std::string& path, std::span<const Scale> scales, std::span<const double> costs = {}) {
  auto out = open_out(path);
  write_scales(out, scales, costs);
}

// ---- melodic corpora -----------------------------------------------------

inline CorpusHistogram corpus_from_csv(const CsvTable& t) {
  const auto c_bin = t.column("semitone_bin"), c_count = t.column("count");
  CorpusHistogram h;
  h.name = std::filesystem::path(t.path).stem().string();
  for (std::size_t r = 0; r < t.rows.size(); ++r) {
    const auto w = t.where(r);
    const long b = parse_long(t.rows[r][c_bin], w, "semitone_bin");
    const double c = parse_double(t.rows[r][c_count], w, "count");
    if (b < 0 || b >= static_cast<long>(CorpusHistogram::kBins)) {
      throw DataError(w.str() + ": semitone_bin must lie in 0..14");
    }
    if (!(c >= 0.0)) throw DataError(w.str() + ": count must be non-negative");
    h.counts[static_cast<std::size_t>(b)] += c;
  }
  try {
    h.validate();
  } catch (const ValidationError& e) {
    throw DataError(t.path + ": " + e.what());
  }
  return h;
}

inline CorpusHistogram read_corpus(const std::string& path) { return corpus_from_csv(read_csv(path)); }

inline void write_corpus(const std::string& path, const CorpusHistogram& h) {
  auto out = open_out(path);
  out << "semitone_bin,count\n";
  for (std::size_t b = 0; b < CorpusHistogram::kBins; ++b) out << b << ',' << fmt(h.counts[b]) << '\n';
}

// ---- pitch tracks --------------------------------------------------------

inline PitchTrack pitch_track_from_csv(const CsvTable& t) {
  const auto c_t = t.column("time_s"), c_c = t.column("cents"), c_v = t.column("voiced");
  PitchTrack track;
  for (std::size_t r = 0; r < t.rows.size(); ++r) {
    const auto w = t.where(r);
    track.times.push_back(parse_double(t.rows[r][c_t], w, "time_s"));
    track.cents.push_back(parse_double(t.rows[r][c_c], w, "cents"));
    track.voiced.push_back(parse_bool(t.rows[r][c_v], w, "voiced"));
  }
  try {
    track.validate();
  } catch (const ValidationError& e) {
    throw DataError(t.path + ": " + e.what());
  }
  return track;
}

inline PitchTrack read_pitch_track(const std::string& path) { return pitch_track_from_csv(read_csv(path)); }

inline void write_pitch_track(const std::string& path, const PitchTrack& track) {
  auto out = open_out(path);
  out << "time_s,cents,voiced\n";
  for (std::size_t i = 0; i < track.size(); ++i) {
    out << fmt(track.times[i]) << ',' << fmt(track.cents[i]) << ',' << fmt_bool(track.voiced[i]) << '\n';
  }
}

// ---- step distributions --------------------------------------------------

inline StepDistribution step_distribution_from_csv(const CsvTable& t) {
  const auto c_lo = t.column("bin_low"), c_hi = t.column("bin_high"), c_p = t.column("probability");
  std::vector<double> edges, probs;
  for (std::size_t r = 0; r < t.rows.size(); ++r) {
    const auto w = t.where(r);
    const double lo = parse_double(t.rows[r][c_lo], w, "bin_low");
    const double hi = parse_double(t.rows[r][c_hi], w, "bin_high");
    if (edges.empty()) {
      edges.push_back(lo);
    } else if (lo != edges.back()) {
      throw DataError(w.str() + ": bins must be contiguous");
    }
    edges.push_back(hi);
    probs.push_back(parse_double(t.rows[r][c_p], w, "probability"));
  }
  if (probs.empty()) throw DataError(t.path + ": no bins");
  try {
    return StepDistribution::from_weights(std::move(edges), probs);
  } catch (const ValidationError& e) {
    throw DataError(t.path + ": " + e.what());
  }
}

inline StepDistribution read_step_distribution(const std::string& path) {
  return step_distribution_from_csv(read_csv(path));
}

inline void write_step_distribution(std::ostream& out, const StepDistribution& d) {
  out << "bin_low,bin_high,probability\n";
  for (std::size_t i = 0; i < d.n_bins(); ++i) {
    out << fmt(d.bin_low(i)) << ',' << fmt(d.bin_high(i)) << ',' << fmt(d.probabilities()[i]) << '\n';
  }
}

inline void write_step_distribution(const std::string& path, const StepDistribution& d) {
  auto out = open_out(path);
  write_step_distribution(out, d);
}

// ---- score tables --------------------------------------------------------

inline void write_score_table(std::ostream& out, const NormalizedScoreTable& t) {
  out << "cents,raw,z\n";
  for (std::size_t i = 0; i < NormalizedScoreTable::kSize; ++i) {
    out << i << ',' << fmt(t.raw()[i]) << ',' << fmt(t.z()[i]) << '\n';
  }
}

inline void write_score_table(const std::string& path, const NormalizedScoreTable& t) {
  auto out = open_out(path);
  write_score_table(out, t);
}

inline NormalizedScoreTable score_table_from_csv(const CsvTable& t, std::string name) {
  const auto c_c = t.column("cents"), c_raw = t.column("raw");
  if (t.rows.size() != NormalizedScoreTable::kSize) throw DataError(t.path + ": score table needs 1251 rows");
  std::vector<double> raw(NormalizedScoreTable::kSize);
  for (std::size_t r = 0; r < t.rows.size(); ++r) {
    const auto w = t.where(r);
    const long c = parse_long(t.rows[r][c_c], w, "cents");
    if (c != static_cast<long>(r)) throw DataError(w.str() + ": cents must run 0..1250 in order");
    raw[r] = parse_double(t.rows[r][c_raw], w, "raw");
  }
  return NormalizedScoreTable::from_raw(std::move(name), std::move(raw));
}

// ---- comparison reports ---------------------------------------------------

inline void write_report_rows(std::ostream& out, const ComparisonReport& rep) {
  out << "scale_id,llr,weight\n";
  for (std::size_t i = 0; i < rep.llrs.size(); ++i) {
    out << rep.ids[i] << ',' << fmt(rep.llrs[i]) << ',' << fmt(rep.weights[i]) << '\n';
  }
}

inline void write_beta_trace(std::ostream& out, const ComparisonReport& rep) {
  out << "beta,weighted_mean_llr\n";
  for (std::size_t i = 0; i < rep.betas.size(); ++i) out << fmt(rep.betas[i]) << ',' << fmt(rep.mean_llr_by_beta[i]) << '\n';
}

inline void write_report_summary(std::ostream& out, const ComparisonReport& rep) {
  out << "model=" << rep.model << '\n'
      << "beta_star=" << fmt(rep.beta_star) << '\n'
      << "beta_at_grid_boundary=" << fmt_bool(rep.at_boundary) << '\n'
      << "weighted_mean_llr=" << fmt(rep.weighted_mean_llr) << '\n'
      << "fraction_positive=" << fmt(rep.fraction_positive) << '\n'
      << "k=" << fmt(rep.k) << '\n'
      << "k_effective=" << fmt(rep.k_effective) << '\n'
      << "threshold=" << fmt(rep.threshold) << '\n'
      << "p_value=" << fmt(rep.p_value) << '\n'
      << "p_value_effective=" << fmt(rep.p_value_effective) << '\n'
      << "significant=" << fmt_bool(rep.significant) << '\n'
      << "n_excluded=" << rep.excluded.size() << '\n';
}

// ---- significance ----------------------------------------------------------

inline void write_significance(std::ostream& out, const SignificanceResult& res) {
  out << "bin_low,bin_high,empirical_freq,null_freq,p,significant_after_BH,direction\n";
  for (const auto& b : res.bins) {
    out << fmt(b.bin_low) << ',' << fmt(b.bin_high) << ',' << fmt(b.empirical_freq) << ',' << fmt(b.null_freq) << ','
        << fmt(b.p) << ',' << fmt_bool(b.significant) << ',' << b.direction << '\n';
  }
}

struct SignificanceRow {
  double bin_low = 0.0, bin_high = 0.0, empirical_freq = 0.0, null_freq = 0.0, p = 1.0;
  bool significant = false;
  std::string direction;
};

inline std::vector<SignificanceRow> significance_from_csv(const CsvTable& t) {
  std::vector<SignificanceRow> out;
  const auto c_lo = t.column("bin_low"), c_hi = t.column("bin_high"), c_e = t.column("empirical_freq"),
             c_n = t.column("null_freq"), c_p = t.column("p"), c_s = t.column("significant_after_BH"),
             c_d = t.column("direction");
  for (std::size_t r = 0; r < t.rows.size(); ++r) {
    const auto w = t.where(r);
    const auto& row = t.rows[r];
    out.push_back({parse_double(row[c_lo], w, "bin_low"), parse_double(row[c_hi], w, "bin_high"),
                   parse_double(row[c_e], w, "empirical_freq"), parse_double(row[c_n], w, "null_freq"),
                   parse_double(row[c_p], w, "p"), parse_bool(row[c_s], w, "significant_after_BH"), row[c_d]});
  }
  return out;
}

// ---- GMM fits ----------------------------------------------------------------

inline void write_gmm(std::ostream& out, const GmmFit& fit) {
  out << "component,mean_cents,std_cents,weight\n";
  for (std::size_t j = 0; j < fit.k; ++j) {
    out << j << ',' << fmt(fit.means[j]) << ',' << fmt(fit.stds[j]) << ',' << fmt(fit.weights[j]) << '\n';
  }
}

inline GmmFit gmm_from_csv(const CsvTable& t) {
  const auto c_m = t.column("mean_cents"), c_s = t.column("std_cents"), c_w = t.column("weight");
  GmmFit fit;
  for (std::size_t r = 0; r < t.rows.size(); ++r) {
    const auto w = t.where(r);
    fit.means.push_back(parse_double(t.rows[r][c_m], w, "mean_cents"));
    fit.stds.push_back(parse_double(t.rows[r][c_s], w, "std_cents"));
    fit.weights.push_back(parse_double(t.rows[r][c_w], w, "weight"));
  }
  fit.k = fit.means.size();
  return fit;
}

// ---- key=value config and manifests -------------------------------------------

using KeyValues = std::map<std::string, std::string>;

/// Manifest field that may differ between otherwise identical runs.
inline constexpr std::string_view kTimestampKey = "created_at";

inline KeyValues parse_key_values(std::istream& in, const std::string& path) {
  KeyValues kv;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto s = trim(line);
    if (s.empty() || s.front() == '#') continue;
    const auto eq = s.find('=');
    if (eq == std::string_view::npos) {
      throw DataError(path + ":" + std::to_string(lineno) + ": expected key=value");
    }
    kv[std::string(trim(s.substr(0, eq)))] = std::string(trim(s.substr(eq + 1)));
  }
  return kv;
}

inline KeyValues read_key_values(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError(path + ": cannot open file");
  return parse_key_values(in, path);
}

inline void write_key_values(std::ostream& out, const KeyValues& kv) {
  for (const auto& [k, v] : kv) out << k << '=' << v << '\n';
}

inline void write_key_values(const std::string& path, const KeyValues& kv) {
  auto out = open_out(path);
  write_key_values(out, kv);
}

/// Key/value pairs with the timestamp removed, for comparing manifests.
inline KeyValues comparable(KeyValues kv) {
  kv.erase(std::string(kTimestampKey));
  return kv;
}

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError(path + ": cannot open file");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace scalevo::io
