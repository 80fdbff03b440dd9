#include "npdw/config.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>
#include <variant>
#include <vector>

namespace npdw {

namespace {

using Value = std::variant<double, bool, std::string, std::vector<double>>;

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

std::string_view strip_comment(std::string_view s) {
  bool quoted = false;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (s[i] == '"') quoted = !quoted;
    if (s[i] == '#' && !quoted) return s.substr(0, i);
  }
  return s;
}

std::optional<double> number(std::string_view s) {
  s = trim(s);
  std::string cleaned;
  for (char c : s)
    if (c != '_') cleaned.push_back(c);
  if (!cleaned.empty() && cleaned.front() == '+') cleaned.erase(0, 1);
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(cleaned.data(), cleaned.data() + cleaned.size(), v);
  if (cleaned.empty() || ec != std::errc{} || ptr != cleaned.data() + cleaned.size()) return std::nullopt;
  return v;
}

Value parse_value(std::string_view raw, const std::string& where) {
  raw = trim(raw);
  if (raw == "true") return true;
  if (raw == "false") return false;
  if (raw.size() >= 2 && raw.front() == '"' && raw.back() == '"') return std::string(raw.substr(1, raw.size() - 2));
  if (raw.size() >= 2 && raw.front() == '[' && raw.back() == ']') {
    std::vector<double> out;
    auto body = trim(raw.substr(1, raw.size() - 2));
    while (!body.empty()) {
      const auto comma = body.find(',');
      const auto item = trim(body.substr(0, comma));
      if (!item.empty()) {
        auto v = number(item);
        if (!v) throw ConfigError(where + ": arrays may only hold numbers");
        out.push_back(*v);
      }
      if (comma == std::string_view::npos) break;
      body = body.substr(comma + 1);
    }
    return out;
  }
  if (auto v = number(raw)) return *v;
  throw ConfigError(where + ": cannot parse value '" + std::string(raw) + "'");
}

using Setter = std::function<void(RunConfig&, const Value&, const std::string&)>;

double as_double(const Value& v, const std::string& where) {
  if (auto* d = std::get_if<double>(&v)) return *d;
  throw ConfigError(where + ": expected a number");
}

template <typename F>
Setter real_setter(F field) {
  return [field](RunConfig& c, const Value& v, const std::string& w) { field(c) = as_double(v, w); };
}

template <typename F>
Setter int_setter(F field) {
  return [field](RunConfig& c, const Value& v, const std::string& w) {
    const double d = as_double(v, w);
    if (d != std::floor(d)) throw ConfigError(w + ": expected an integer");
    field(c) = static_cast<std::remove_reference_t<decltype(field(c))>>(d);
  };
}

template <typename F>
Setter bool_setter(F field) {
  return [field](RunConfig& c, const Value& v, const std::string& w) {
    auto* b = std::get_if<bool>(&v);
    if (!b) throw ConfigError(w + ": expected true or false");
    field(c) = *b;
  };
}

const std::map<std::string, std::map<std::string, Setter>>& schema() {
  static const std::map<std::string, std::map<std::string, Setter>> s = {
      {"sim",
       {
           {"num_cores", int_setter([](RunConfig& c) -> int& { return c.sim.num_cores; })},
           {"c_msp", real_setter([](RunConfig& c) -> double& { return c.sim.c_msp; })},
           {"tick", real_setter([](RunConfig& c) -> double& { return c.sim.tick; })},
           {"ambient", real_setter([](RunConfig& c) -> double& { return c.sim.ambient; })},
           {"heating", real_setter([](RunConfig& c) -> double& { return c.sim.heating; })},
           {"cooling", real_setter([](RunConfig& c) -> double& { return c.sim.cooling; })},
           {"throttle_enabled", bool_setter([](RunConfig& c) -> bool& { return c.sim.throttle_enabled; })},
           {"throttle_threshold", real_setter([](RunConfig& c) -> double& { return c.sim.throttle_threshold; })},
           {"throttle_factor", real_setter([](RunConfig& c) -> double& { return c.sim.throttle_factor; })},
           {"temp_boundaries",
            [](RunConfig& c, const Value& v, const std::string& w) {
              auto* a = std::get_if<std::vector<double>>(&v);
              if (!a || a->size() != 2) throw ConfigError(w + ": expected an array of two numbers");
              c.sim.temp_boundaries = {(*a)[0], (*a)[1]};
            }},
           {"load_window", real_setter([](RunConfig& c) -> double& { return c.sim.load_window; })},
           {"sample_interval", real_setter([](RunConfig& c) -> double& { return c.sim.sample_interval; })},
           {"wp_sample_interval", real_setter([](RunConfig& c) -> double& { return c.sim.wp_sample_interval; })},
           {"duration_sigma", real_setter([](RunConfig& c) -> double& { return c.sim.duration_sigma; })},
           {"duration_scale", real_setter([](RunConfig& c) -> double& { return c.sim.duration_scale; })},
           {"stall_limit", real_setter([](RunConfig& c) -> double& { return c.sim.stall_limit; })},
           {"seed", int_setter([](RunConfig& c) -> std::uint64_t& { return c.sim.seed; })},
       }},
      {"credit",
       {
           {"base_credit", real_setter([](RunConfig& c) -> double& { return c.scheduler.credit.base_credit; })},
           {"gain_rate", real_setter([](RunConfig& c) -> double& { return c.scheduler.credit.gain_rate; })},
           {"max_rounds", int_setter([](RunConfig& c) -> int& { return c.scheduler.credit.max_rounds; })},
       }},
      {"affinity",
       {
           {"beta", real_setter([](RunConfig& c) -> double& { return c.scheduler.affinity.beta; })},
       }},
      {"window",
       {
           {"alpha1", real_setter([](RunConfig& c) -> double& { return c.scheduler.perf.alpha1; })},
           {"alpha2", real_setter([](RunConfig& c) -> double& { return c.scheduler.perf.alpha2; })},
           {"amp_floor", real_setter([](RunConfig& c) -> double& { return c.scheduler.window.amp_floor; })},
           {"min_size", real_setter([](RunConfig& c) -> double& { return c.scheduler.window.min_size; })},
           {"max_size", real_setter([](RunConfig& c) -> double& { return c.scheduler.window.max_size; })},
           {"hold_tolerance", real_setter([](RunConfig& c) -> double& { return c.scheduler.window.hold_tolerance; })},
       }},
      {"analyzer",
       {
           {"time_moderate", real_setter([](RunConfig& c) -> double& { return c.analyzer.time_moderate; })},
           {"time_high", real_setter([](RunConfig& c) -> double& { return c.analyzer.time_high; })},
           {"power_moderate", real_setter([](RunConfig& c) -> double& { return c.analyzer.power_moderate; })},
           {"power_high", real_setter([](RunConfig& c) -> double& { return c.analyzer.power_high; })},
       }},
      {"workload",
       {
           {"rate", real_setter([](RunConfig& c) -> double& { return c.workload.rate; })},
           {"horizon", real_setter([](RunConfig& c) -> double& { return c.workload.horizon; })},
           {"seed", int_setter([](RunConfig& c) -> std::uint64_t& { return c.workload.seed; })},
           {"deadline_probability",
            real_setter([](RunConfig& c) -> double& { return c.workload.deadline_probability; })},
           {"slack_min", real_setter([](RunConfig& c) -> double& { return c.workload.slack_min; })},
           {"slack_max", real_setter([](RunConfig& c) -> double& { return c.workload.slack_max; })},
       }},
  };
  return s;
}

}  // namespace

void RunConfig::validate() const {
  sim.validate();
  scheduler.validate();
  analyzer.validate();
  workload.validate();
}

RunConfig parse_config(std::string_view text, RunConfig base) {
  std::string section;
  std::size_t line_no = 0;
  std::istringstream is{std::string(text)};
  std::string line;
  while (std::getline(is, line)) {
    ++line_no;
    const auto where = "config line " + std::to_string(line_no);
    auto s = trim(strip_comment(line));
    if (s.empty()) continue;
    if (s.front() == '[') {
      if (s.back() != ']') throw ConfigError(where + ": unterminated section header");
      section = std::string(trim(s.substr(1, s.size() - 2)));
      if (!schema().count(section)) throw ConfigError(where + ": unknown section [" + section + "]");
      continue;
    }
    const auto eq = s.find('=');
    if (eq == std::string_view::npos) throw ConfigError(where + ": expected key = value");
    const std::string key(trim(s.substr(0, eq)));
    if (section.empty()) throw ConfigError(where + ": key '" + key + "' outside a section");
    const auto& keys = schema().at(section);
    auto it = keys.find(key);
    if (it == keys.end()) throw ConfigError(where + ": unknown key '" + section + "." + key + "'");
    it->second(base, parse_value(s.substr(eq + 1), where), where + " (" + section + "." + key + ")");
  }
  try {
    base.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  return base;
}

RunConfig load_config(const std::filesystem::path& path, RunConfig base) {
  std::ifstream is(path);
  if (!is) throw ConfigError("cannot read config " + path.string());
  std::ostringstream ss;
  ss << is.rdbuf();
  return parse_config(ss.str(), base);
}

nlohmann::ordered_json to_json(const RunConfig& c) {
  nlohmann::ordered_json j;
  j["sim"] = {
      {"num_cores", c.sim.num_cores},
      {"c_msp", c.sim.c_msp},
      {"tick", c.sim.tick},
      {"ambient", c.sim.ambient},
      {"heating", c.sim.heating},
      {"cooling", c.sim.cooling},
      {"throttle_enabled", c.sim.throttle_enabled},
      {"throttle_threshold", c.sim.throttle_threshold},
      {"throttle_factor", c.sim.throttle_factor},
      {"temp_boundaries", {c.sim.temp_boundaries[0], c.sim.temp_boundaries[1]}},
      {"load_window", c.sim.load_window},
      {"sample_interval", c.sim.sample_interval},
      {"wp_sample_interval", c.sim.wp_sample_interval},
      {"duration_sigma", c.sim.duration_sigma},
      {"duration_scale", c.sim.duration_scale},
      {"stall_limit", c.sim.stall_limit},
      {"seed", c.sim.seed},
  };
  j["credit"] = {{"base_credit", c.scheduler.credit.base_credit},
                 {"gain_rate", c.scheduler.credit.gain_rate},
                 {"max_rounds", c.scheduler.credit.max_rounds}};
  j["affinity"] = {{"beta", c.scheduler.affinity.beta}};
  j["window"] = {{"alpha1", c.scheduler.perf.alpha1},       {"alpha2", c.scheduler.perf.alpha2},
                 {"amp_floor", c.scheduler.window.amp_floor}, {"min_size", c.scheduler.window.min_size},
                 {"max_size", c.scheduler.window.max_size},   {"hold_tolerance", c.scheduler.window.hold_tolerance}};
  j["analyzer"] = {{"time_moderate", c.analyzer.time_moderate},
                   {"time_high", c.analyzer.time_high},
                   {"power_moderate", c.analyzer.power_moderate},
                   {"power_high", c.analyzer.power_high}};
  j["workload"] = {{"rate", c.workload.rate},
                   {"horizon", c.workload.horizon},
                   {"seed", c.workload.seed},
                   {"deadline_probability", c.workload.deadline_probability},
                   {"slack_min", c.workload.slack_min},
                   {"slack_max", c.workload.slack_max}};
  return j;
}

}  // namespace npdw
