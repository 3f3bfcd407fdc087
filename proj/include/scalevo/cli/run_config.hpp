#pragma once

#include <chrono>
#include <cstdint>
#include <ctime>
#include <iomanip>
#include <sstream>
#include <string>
#include <vector>

#include "scalevo/error.hpp"
#include "scalevo/io.hpp"

namespace scalevo::cli {

inline constexpr std::string_view kVersion = "1.0.0";

/// Command parameters as flat key=value pairs. Every value read through a getter,
/// including defaults, is recorded so the manifest captures the full effective
/// configuration.
class RunConfig {
 public:
  RunConfig() = default;
  explicit RunConfig(io::KeyValues values) : values_(std::move(values)) {}

  void set(const std::string& key, std::string value) { values_[key] = std::move(value); }
  bool has(const std::string& key) const { return values_.count(key) > 0 && !values_.at(key).empty(); }
  const io::KeyValues& values() const { return values_; }
  const io::KeyValues& effective() const { return effective_; }

  std::string str(const std::string& key, const std::string& def) {
    const auto v = has(key) ? values_.at(key) : def;
    effective_[key] = v;
    return v;
  }

  std::string required(const std::string& key) {
    if (!has(key)) throw UsageError("missing required option --" + dashed(key));
    return str(key, "");
  }

  double real(const std::string& key, double def) {
    if (!has(key)) {
      effective_[key] = io::fmt(def);
      return def;
    }
    const auto v = io::parse_double(values_.at(key), {"option --" + dashed(key), 0}, key);
    effective_[key] = io::fmt(v);
    return v;
  }

  long integer(const std::string& key, long def) {
    if (!has(key)) {
      effective_[key] = std::to_string(def);
      return def;
    }
    long v = 0;
    try {
      v = io::parse_long(values_.at(key), {"option --" + dashed(key), 0}, key);
    } catch (const DataError&) {
      throw UsageError("option --" + dashed(key) + " expects an integer, got '" + values_.at(key) + "'");
    }
    effective_[key] = std::to_string(v);
    return v;
  }

  std::size_t count(const std::string& key, long def) {
    const long v = integer(key, def);
    if (v < 0) throw UsageError("option --" + dashed(key) + " must be non-negative");
    return static_cast<std::size_t>(v);
  }

  std::uint64_t seed() {
    if (!has("seed")) throw UsageError("randomized commands require an explicit --seed");
    const auto& s = values_.at("seed");
    std::uint64_t v = 0;
    const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec != std::errc() || res.ptr != s.data() + s.size()) throw UsageError("--seed expects an unsigned integer");
    effective_["seed"] = std::to_string(v);
    return v;
  }

  bool flag(const std::string& key, bool def) {
    if (!has(key)) {
      effective_[key] = def ? "1" : "0";
      return def;
    }
    bool v = false;
    try {
      v = io::parse_bool(values_.at(key), {"option --" + dashed(key), 0}, key);
    } catch (const DataError&) {
      throw UsageError("option --" + dashed(key) + " expects 0/1 or true/false");
    }
    effective_[key] = v ? "1" : "0";
    return v;
  }

  std::vector<double> reals(const std::string& key, const std::string& def) {
    const auto s = str(key, def);
    std::vector<double> out;
    if (s.empty()) return out;
    for (const auto& f : io::split(s, ',')) {
      try {
        out.push_back(io::parse_double(f, {"option --" + dashed(key), 0}, key));
      } catch (const DataError& e) {
        throw UsageError(e.what());
      }
    }
    return out;
  }

  std::vector<std::string> list(const std::string& key) {
    const auto s = str(key, "");
    std::vector<std::string> out;
    if (s.empty()) return out;
    for (auto& f : io::split(s, ',')) {
      if (!f.empty()) out.push_back(std::move(f));
    }
    return out;
  }

  static std::string dashed(std::string key) {
    for (auto& c : key) {
      if (c == '_') c = '-';
    }
    return key;
  }

 private:
  io::KeyValues values_;
  io::KeyValues effective_;
};

inline std::string utc_timestamp() {
  const auto now = std::chrono::system_clock::now();
  const std::time_t t = std::chrono::system_clock::to_time_t(now);
  std::tm tm{};
  gmtime_r(&t, &tm);
  std::ostringstream ss;
  ss << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
  return ss.str();
}

/// Writes out/manifest.txt: command, version, every effective parameter and a
/// timestamp under the excluded key.
inline void write_manifest(const std::string& out_dir, const std::string& command, const RunConfig& cfg) {
  io::KeyValues kv = cfg.effective();
  kv.erase("out");
  kv["command"] = command;
  kv["version"] = std::string(kVersion);
  kv[std::string(io::kTimestampKey)] = utc_timestamp();
  io::write_key_values(out_dir + "/manifest.txt", kv);
}

}  // namespace scalevo::cli
