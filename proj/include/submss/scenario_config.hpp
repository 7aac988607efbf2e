#ifndef SUBMSS_SCENARIO_CONFIG_HPP
#define SUBMSS_SCENARIO_CONFIG_HPP

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "submss/aqm_queue.hpp"
#include "submss/sim_time.hpp"
#include "submss/tcp_sender.hpp"

namespace submss {

class ConfigError : public std::runtime_error {
 public:
  ConfigError(std::string field, const std::string& msg)
      : std::runtime_error(field.empty() ? msg : field + ": " + msg), field_(std::move(field)) {}
  const std::string& field() const { return field_; }

 private:
  std::string field_;
};

struct ScenarioConfig {
  std::int64_t capacity_bps = 0;
  int n_flows = 0;
  std::int64_t frame_size = 0;  // P, header-inclusive
  std::int64_t smss = 0;        // M, payload
  SimTime base_rtt;
  AqmPolicy aqm = AqmPolicy::ramp_mark;
  SimTime target_delay;
  std::optional<SimTime> ramp_ceiling;  // default 2 x target_delay
  std::int64_t buffer_limit = 0;
  SenderMode sender_mode = SenderMode::baseline;
  CcVariant cc_variant = CcVariant::reno_like;
  bool ecn = true;
  bool delayed_acks = true;
  SimTime duration;
  std::optional<SimTime> warmup;  // default 25% of duration
  std::uint64_t seed = 1;
  double w_min_fraction = 1.0 / 64;

  // Optional knobs.
  SimTime min_rto = SimTime::ms(200);
  SimTime delack_timeout = SimTime::ms(40);
  int ack_every = 2;
  std::optional<SimTime> ack_outage_start;
  SimTime ack_outage_duration;
  SimTime fairness_bin = SimTime::s(1);
  SimTime sample_interval = SimTime::us(100);

  SimTime effective_ramp_ceiling() const { return ramp_ceiling.value_or(target_delay * 2); }
  SimTime effective_warmup() const { return warmup.value_or(duration / 4); }
  std::int64_t header_bytes() const { return frame_size - smss; }
  std::int64_t min_window() const {
    return std::max<std::int64_t>(1, std::llround(w_min_fraction * static_cast<double>(smss)));
  }

  void validate() const {
    if (capacity_bps <= 0) throw ConfigError("capacity", "must be positive");
    if (n_flows <= 0) throw ConfigError("n_flows", "must be positive");
    if (frame_size <= 0) throw ConfigError("frame_size", "must be positive");
    if (smss <= 0) throw ConfigError("smss", "must be positive");
    if (smss >= frame_size) throw ConfigError("smss", "must be smaller than frame_size");
    if (base_rtt <= SimTime::zero()) throw ConfigError("base_rtt", "must be positive");
    if (target_delay < SimTime::zero()) throw ConfigError("target_delay", "must be non-negative");
    if (aqm != AqmPolicy::drop_tail && effective_ramp_ceiling() <= target_delay) {
      throw ConfigError("ramp_ceiling", "must exceed target_delay");
    }
    if (buffer_limit <= bytes_in(target_delay, capacity_bps)) {
      throw ConfigError("buffer_limit", "must exceed the byte equivalent of target_delay");
    }
    if (buffer_limit < frame_size) throw ConfigError("buffer_limit", "must hold one frame");
    if (duration <= SimTime::zero()) throw ConfigError("duration", "must be positive");
    if (effective_warmup() < SimTime::zero() || effective_warmup() >= duration) {
      throw ConfigError("warmup", "must be in [0, duration)");
    }
    if (!(w_min_fraction > 0.0 && w_min_fraction <= 1.0)) {
      throw ConfigError("w_min_fraction", "must be in (0, 1]");
    }
    if (min_rto <= SimTime::zero()) throw ConfigError("min_rto", "must be positive");
    if (delack_timeout <= SimTime::zero()) throw ConfigError("delack_timeout", "must be positive");
    if (ack_every < 1) throw ConfigError("ack_every", "must be at least 1");
    if (ack_outage_start && ack_outage_duration <= SimTime::zero()) {
      throw ConfigError("ack_outage_duration", "must be positive when ack_outage_start is set");
    }
    if (fairness_bin <= SimTime::zero()) throw ConfigError("fairness_bin", "must be positive");
    if (sample_interval <= SimTime::zero()) {
      throw ConfigError("sample_interval", "must be positive");
    }
  }
};

namespace detail {

inline std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(b, e - b + 1));
}

inline std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return s;
}

// Splits "40mbps" / "40 mbps" into (40, "mbps").
inline std::pair<double, std::string> number_and_unit(const std::string& field,
                                                      const std::string& raw) {
  const std::string v = trim(raw);
  std::size_t pos = 0;
  double x = 0;
  try {
    x = std::stod(v, &pos);
  } catch (const std::exception&) {
    throw ConfigError(field, "expected a number, got '" + v + "'");
  }
  if (!std::isfinite(x)) throw ConfigError(field, "not a finite number");
  return {x, lower(trim(std::string_view(v).substr(pos)))};
}

inline std::int64_t to_int(const std::string& field, double x) {
  if (std::abs(x) > 9.0e18) throw ConfigError(field, "out of range");
  return std::llround(x);
}

}  // namespace detail

inline SimTime parse_time(const std::string& field, const std::string& raw) {
  const auto [x, unit] = detail::number_and_unit(field, raw);
  double scale = 0;
  if (unit == "ns") scale = 1;
  else if (unit == "us") scale = 1e3;
  else if (unit == "ms") scale = 1e6;
  else if (unit == "s") scale = 1e9;
  else throw ConfigError(field, "time needs a unit (ns, us, ms, s), got '" + raw + "'");
  if (x < 0) throw ConfigError(field, "must be non-negative");
  return SimTime::ns(detail::to_int(field, x * scale));
}

inline std::int64_t parse_rate(const std::string& field, const std::string& raw) {
  const auto [x, unit] = detail::number_and_unit(field, raw);
  double scale = 0;
  if (unit == "bps") scale = 1;
  else if (unit == "kbps") scale = 1e3;
  else if (unit == "mbps") scale = 1e6;
  else if (unit == "gbps") scale = 1e9;
  else throw ConfigError(field, "rate needs a unit (bps, kbps, mbps, gbps), got '" + raw + "'");
  return detail::to_int(field, x * scale);
}

inline std::int64_t parse_bytes(const std::string& field, const std::string& raw) {
  const auto [x, unit] = detail::number_and_unit(field, raw);
  double scale = 0;
  if (unit.empty() || unit == "b") scale = 1;
  else if (unit == "kb") scale = 1e3;
  else if (unit == "mb") scale = 1e6;
  else throw ConfigError(field, "size unit must be B, KB or MB, got '" + raw + "'");
  const double v = x * scale;
  if (v != std::floor(v)) throw ConfigError(field, "must be a whole number of bytes");
  return detail::to_int(field, v);
}

inline std::int64_t parse_integer(const std::string& field, const std::string& raw) {
  const std::string v = detail::trim(raw);
  std::size_t pos = 0;
  long long x = 0;
  try {
    x = std::stoll(v, &pos);
  } catch (const std::exception&) {
    throw ConfigError(field, "expected an integer, got '" + v + "'");
  }
  if (pos != v.size()) throw ConfigError(field, "expected an integer, got '" + v + "'");
  return x;
}

// Accepts "0.015625" or "1/64".
inline double parse_fraction(const std::string& field, const std::string& raw) {
  const std::string v = detail::trim(raw);
  const auto slash = v.find('/');
  if (slash == std::string::npos) {
    const auto [x, unit] = detail::number_and_unit(field, v);
    if (!unit.empty()) throw ConfigError(field, "unexpected suffix '" + unit + "'");
    return x;
  }
  const auto num = detail::number_and_unit(field, v.substr(0, slash));
  const auto den = detail::number_and_unit(field, v.substr(slash + 1));
  if (!num.second.empty() || !den.second.empty() || den.first == 0) {
    throw ConfigError(field, "malformed fraction '" + v + "'");
  }
  return num.first / den.first;
}

inline bool parse_flag(const std::string& field, const std::string& raw) {
  const std::string v = detail::lower(detail::trim(raw));
  if (v == "on" || v == "true" || v == "yes" || v == "1") return true;
  if (v == "off" || v == "false" || v == "no" || v == "0") return false;
  throw ConfigError(field, "expected on/off, got '" + raw + "'");
}

inline AqmPolicy parse_aqm(const std::string& field, const std::string& raw) {
  const std::string v = detail::lower(detail::trim(raw));
  if (v == "drop-tail") return AqmPolicy::drop_tail;
  if (v == "red-drop") return AqmPolicy::red_drop;
  if (v == "ramp-mark") return AqmPolicy::ramp_mark;
  throw ConfigError(field, "expected drop-tail, red-drop or ramp-mark, got '" + raw + "'");
}

inline SenderMode parse_mode(const std::string& field, const std::string& raw) {
  const std::string v = detail::lower(detail::trim(raw));
  if (v == "baseline") return SenderMode::baseline;
  if (v == "submss") return SenderMode::submss;
  throw ConfigError(field, "expected baseline or submss, got '" + raw + "'");
}

inline CcVariant parse_cc(const std::string& field, const std::string& raw) {
  const std::string v = detail::lower(detail::trim(raw));
  if (v == "reno-like") return CcVariant::reno_like;
  if (v == "dctcp-like") return CcVariant::dctcp_like;
  throw ConfigError(field, "expected reno-like or dctcp-like, got '" + raw + "'");
}

namespace detail {

using Setter = std::function<void(ScenarioConfig&, const std::string&, const std::string&)>;

struct KeySpec {
  bool required;
  Setter set;
};

inline const std::map<std::string, KeySpec>& key_table() {
  static const std::map<std::string, KeySpec> table = {
      {"capacity", {true, [](auto& c, auto& k, auto& v) { c.capacity_bps = parse_rate(k, v); }}},
      {"n_flows", {true, [](auto& c, auto& k, auto& v) {
         const auto n = parse_integer(k, v);
         if (n <= 0 || n > 100000) throw ConfigError(k, "must be in [1, 100000]");
         c.n_flows = static_cast<int>(n);
       }}},
      {"frame_size", {true, [](auto& c, auto& k, auto& v) { c.frame_size = parse_bytes(k, v); }}},
      {"smss", {true, [](auto& c, auto& k, auto& v) { c.smss = parse_bytes(k, v); }}},
      {"base_rtt", {true, [](auto& c, auto& k, auto& v) { c.base_rtt = parse_time(k, v); }}},
      {"aqm", {true, [](auto& c, auto& k, auto& v) { c.aqm = parse_aqm(k, v); }}},
      {"target_delay", {true, [](auto& c, auto& k, auto& v) { c.target_delay = parse_time(k, v); }}},
      {"ramp_ceiling", {false, [](auto& c, auto& k, auto& v) { c.ramp_ceiling = parse_time(k, v); }}},
      {"buffer_limit", {true, [](auto& c, auto& k, auto& v) { c.buffer_limit = parse_bytes(k, v); }}},
      {"sender_mode", {true, [](auto& c, auto& k, auto& v) { c.sender_mode = parse_mode(k, v); }}},
      {"cc_variant", {true, [](auto& c, auto& k, auto& v) { c.cc_variant = parse_cc(k, v); }}},
      {"ecn", {true, [](auto& c, auto& k, auto& v) { c.ecn = parse_flag(k, v); }}},
      {"delayed_acks", {true, [](auto& c, auto& k, auto& v) { c.delayed_acks = parse_flag(k, v); }}},
      {"duration", {true, [](auto& c, auto& k, auto& v) { c.duration = parse_time(k, v); }}},
      {"warmup", {false, [](auto& c, auto& k, auto& v) { c.warmup = parse_time(k, v); }}},
      {"seed", {true, [](auto& c, auto& k, auto& v) {
         const auto s = parse_integer(k, v);
         if (s < 0) throw ConfigError(k, "must be non-negative");
         c.seed = static_cast<std::uint64_t>(s);
       }}},
      {"w_min_fraction", {false, [](auto& c, auto& k, auto& v) { c.w_min_fraction = parse_fraction(k, v); }}},
      {"min_rto", {false, [](auto& c, auto& k, auto& v) { c.min_rto = parse_time(k, v); }}},
      {"delack_timeout", {false, [](auto& c, auto& k, auto& v) { c.delack_timeout = parse_time(k, v); }}},
      {"ack_every", {false, [](auto& c, auto& k, auto& v) {
         const auto n = parse_integer(k, v);
         if (n < 1 || n > 1000) throw ConfigError(k, "must be in [1, 1000]");
         c.ack_every = static_cast<int>(n);
       }}},
      {"ack_outage_start", {false, [](auto& c, auto& k, auto& v) { c.ack_outage_start = parse_time(k, v); }}},
      {"ack_outage_duration", {false, [](auto& c, auto& k, auto& v) { c.ack_outage_duration = parse_time(k, v); }}},
      {"fairness_bin", {false, [](auto& c, auto& k, auto& v) { c.fairness_bin = parse_time(k, v); }}},
      {"sample_interval", {false, [](auto& c, auto& k, auto& v) { c.sample_interval = parse_time(k, v); }}},
  };
  return table;
}

}  // namespace detail

inline std::vector<std::string> scenario_keys() {
  std::vector<std::string> out;
  for (const auto& [k, spec] : detail::key_table()) out.push_back(k);
  return out;
}

// Applies one `key = value` setting. Unknown keys are an error.
inline void apply_setting(ScenarioConfig& cfg, const std::string& key, const std::string& value) {
  const auto& table = detail::key_table();
  const auto it = table.find(key);
  if (it == table.end()) throw ConfigError(key, "unknown key");
  it->second.set(cfg, key, value);
}

inline ScenarioConfig parse_scenario(std::string_view text) {
  ScenarioConfig cfg;
  std::set<std::string> seen;
  std::istringstream in{std::string(text)};
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    const std::string t = detail::trim(line);
    if (t.empty()) continue;
    const auto eq = t.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("", "line " + std::to_string(lineno) + ": expected 'key = value'");
    }
    const std::string key = detail::trim(std::string_view(t).substr(0, eq));
    const std::string value = detail::trim(std::string_view(t).substr(eq + 1));
    if (key.empty()) throw ConfigError("", "line " + std::to_string(lineno) + ": empty key");
    if (!seen.insert(key).second) throw ConfigError(key, "duplicate key");
    apply_setting(cfg, key, value);
  }
  for (const auto& [k, spec] : detail::key_table()) {
    if (spec.required && !seen.count(k)) throw ConfigError(k, "missing required key");
  }
  cfg.validate();
  return cfg;
}

inline ScenarioConfig load_scenario(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw ConfigError("", "cannot open scenario file '" + path + "'");
  std::stringstream ss;
  ss << f.rdbuf();
  return parse_scenario(ss.str());
}

}  // namespace submss

#endif  // SUBMSS_SCENARIO_CONFIG_HPP
