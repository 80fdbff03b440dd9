#include "npdw/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <json.hpp>
#include <sstream>

#include "npdw/trace_io.hpp"

namespace npdw::metrics {

namespace {

struct MetricColumn {
  const char* key;
  const char* title;
  double TrialMetrics::*field;
};

constexpr MetricColumn kColumns[] = {
    {"load_stddev", "Standard deviation of average core load (pp)", &TrialMetrics::load_stddev},
    {"avg_utilization", "Average utilization throughput (%)", &TrialMetrics::avg_utilization},
    {"thermal_stddev", "Standard deviation of core temperature (C)", &TrialMetrics::thermal_stddev},
    {"avg_temperature", "Average core temperature (C)", &TrialMetrics::avg_temperature},
    {"waiting_cv", "Coefficient of variation of waiting time", &TrialMetrics::waiting_cv},
};

std::vector<SchedulerKind> validate_rows(std::span<const TrialRow> rows) {
  if (rows.empty()) throw std::invalid_argument("comparison: no trials");
  std::vector<SchedulerKind> cols;
  for (auto k : kAllSchedulers)
    if (rows.front().by_scheduler.count(k)) cols.push_back(k);
  if (cols.empty()) throw std::invalid_argument("comparison: no schedulers");
  for (const auto& r : rows) {
    if (r.by_scheduler.size() != cols.size() ||
        !std::all_of(cols.begin(), cols.end(), [&](SchedulerKind k) { return r.by_scheduler.count(k) > 0; }))
      throw std::invalid_argument("comparison: trial '" + r.trial + "' does not cover the same schedulers");
  }
  return cols;
}

std::string upper(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(), [](unsigned char c) { return std::toupper(c); });
  return out;
}

std::string fixed(double v) {
  std::ostringstream os;
  os << std::fixed << std::setprecision(4) << v;
  return os.str();
}

}  // namespace

double mean(std::span<const double> xs) {
  if (xs.empty()) throw MetricsError("mean of an empty sample");
  double s = 0.0;
  for (double x : xs) s += x;
  return s / static_cast<double>(xs.size());
}

double pstdev(std::span<const double> xs) {
  const double m = mean(xs);
  double s = 0.0;
  for (double x : xs) s += (x - m) * (x - m);
  return std::sqrt(s / static_cast<double>(xs.size()));
}

TrialMetrics compute_metrics(const sim::SimTrace& trace) {
  std::vector<std::string> failures;

  std::map<double, std::vector<const sim::CoreSample*>> by_time;
  std::map<std::uint32_t, std::vector<double>> load_by_core;
  for (const auto& s : trace.cores) {
    by_time[s.time].push_back(&s);
    load_by_core[s.core].push_back(s.load);
  }
  if (by_time.size() < 2) failures.push_back("load/thermal metrics need at least 2 core sampling instants");

  std::vector<double> waits;
  std::size_t finished = 0;
  for (const auto& t : trace.tasks) {
    if (auto w = t.waiting()) waits.push_back(*w);
    if (t.finish) ++finished;
  }
  if (finished < 2) failures.push_back("waiting_cv needs at least 2 finished tasks");
  else if (waits.empty() || !(mean(waits) > 0.0)) failures.push_back("waiting_cv needs a positive mean waiting time");

  if (!failures.empty()) {
    std::string msg = "degenerate trace:";
    for (const auto& f : failures) msg += " " + f + ";";
    throw MetricsError(msg);
  }

  TrialMetrics m;
  std::vector<double> per_core;
  std::vector<double> all_loads;
  for (const auto& [core, loads] : load_by_core) {
    per_core.push_back(mean(loads) * 100.0);
    all_loads.insert(all_loads.end(), loads.begin(), loads.end());
  }
  m.load_stddev = pstdev(per_core);
  m.avg_utilization = mean(all_loads) * 100.0;

  std::vector<double> spread;
  std::vector<double> temps;
  for (const auto& [time, samples] : by_time) {
    std::vector<double> at;
    for (const auto* s : samples) at.push_back(s->temp);
    spread.push_back(pstdev(at));
    temps.insert(temps.end(), at.begin(), at.end());
  }
  m.thermal_stddev = mean(spread);
  m.avg_temperature = mean(temps);
  m.waiting_cv = pstdev(waits) / mean(waits);
  return m;
}

TableFormat parse_format(std::string_view name) {
  if (name == "csv") return TableFormat::Csv;
  if (name == "text") return TableFormat::Text;
  if (name == "json") return TableFormat::Json;
  throw std::invalid_argument("unknown format '" + std::string(name) + "' (expected csv, text or json)");
}

std::string render_comparison(std::span<const TrialRow> rows, TableFormat format) {
  const auto cols = validate_rows(rows);
  std::ostringstream os;

  switch (format) {
    case TableFormat::Csv: {
      os << "# population standard deviations\n";
      os << "metric,trial";
      for (auto k : cols) os << ',' << upper(to_string(k));
      os << '\n';
      for (const auto& c : kColumns)
        for (const auto& r : rows) {
          os << c.key << ',' << r.trial;
          for (auto k : cols) os << ',' << io::format_double(r.by_scheduler.at(k).*c.field);
          os << '\n';
        }
      break;
    }
    case TableFormat::Text: {
      std::size_t trial_w = 5;
      for (const auto& r : rows) trial_w = std::max(trial_w, r.trial.size());
      constexpr int kCell = 12;
      os << "Standard deviations are population standard deviations.\n\n";
      for (const auto& c : kColumns) {
        os << c.title << '\n';
        os << std::left << std::setw(static_cast<int>(trial_w)) << "Trial";
        for (auto k : cols) os << std::right << std::setw(kCell) << upper(to_string(k));
        os << '\n';
        for (const auto& r : rows) {
          os << std::left << std::setw(static_cast<int>(trial_w)) << r.trial;
          for (auto k : cols) os << std::right << std::setw(kCell) << fixed(r.by_scheduler.at(k).*c.field);
          os << '\n';
        }
        os << '\n';
      }
      break;
    }
    case TableFormat::Json: {
      nlohmann::ordered_json j;
      j["schedulers"] = nlohmann::json::array();
      for (auto k : cols) j["schedulers"].push_back(upper(to_string(k)));
      j["stddev"] = "population";
      for (const auto& c : kColumns) {
        auto& table = j["metrics"][c.key];
        for (const auto& r : rows) {
          nlohmann::ordered_json row;
          row["trial"] = r.trial;
          for (auto k : cols) row[upper(to_string(k))] = r.by_scheduler.at(k).*c.field;
          table.push_back(row);
        }
      }
      os << j.dump(2) << '\n';
      break;
    }
  }
  return os.str();
}

void write_comparison(std::span<const TrialRow> rows, const std::filesystem::path& dir) {
  const auto csv = render_comparison(rows, TableFormat::Csv);
  const auto text = render_comparison(rows, TableFormat::Text);
  const auto json = render_comparison(rows, TableFormat::Json);
  std::filesystem::create_directories(dir);
  const std::pair<const char*, const std::string*> files[] = {
      {"comparison.csv", &csv}, {"comparison.txt", &text}, {"comparison.json", &json}};
  for (const auto& [name, body] : files) {
    std::ofstream os(dir / name);
    if (!os) throw std::runtime_error("cannot write " + (dir / name).string());
    os << *body;
  }
}

}  // namespace npdw::metrics
