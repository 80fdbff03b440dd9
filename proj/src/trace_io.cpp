#include "npdw/trace_io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <vector>

namespace npdw::io {

namespace {

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::string field;
  std::istringstream is(line);
  while (std::getline(is, field, ',')) out.push_back(field);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

double to_double(const std::string& s, const std::string& where) {
  if (s == "inf") return std::numeric_limits<double>::infinity();
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || ptr != s.data() + s.size()) throw std::runtime_error(where + ": bad number '" + s + "'");
  return v;
}

std::optional<double> opt_double(const std::string& s, const std::string& where) {
  if (s.empty() || s == "none") return std::nullopt;
  return to_double(s, where);
}

template <typename T>
std::string opt(const std::optional<T>& v) {
  if (!v) return "";
  if constexpr (std::is_floating_point_v<T>) return format_double(*v);
  else return std::to_string(*v);
}

std::ofstream open_out(const std::filesystem::path& p) {
  std::ofstream os(p);
  if (!os) throw std::runtime_error("cannot write " + p.string());
  return os;
}

std::vector<std::vector<std::string>> read_csv(const std::filesystem::path& p, std::string_view header) {
  std::ifstream is(p);
  if (!is) throw std::runtime_error("cannot read " + p.string());
  std::string line;
  if (!std::getline(is, line) || line != header)
    throw std::runtime_error(p.string() + ": expected header '" + std::string(header) + "'");
  std::vector<std::vector<std::string>> rows;
  while (std::getline(is, line))
    if (!line.empty()) rows.push_back(split(line));
  return rows;
}

constexpr std::string_view kCoresHeader = "time_s,core,speed_mhz,load,temp_c";
constexpr std::string_view kTasksHeader =
    "task_id,program,p1,p2,deadline_s,arrival_s,matched_s,start_s,finish_s,waiting_s,charged_credit,core,duration_s";
constexpr std::string_view kWindowsHeader = "window_index,size_s,awp,amp,direction";

ResizeDirection parse_direction(const std::string& s) {
  for (auto d : {ResizeDirection::Continue, ResizeDirection::Hold, ResizeDirection::Reverse})
    if (to_string(d) == s) return d;
  throw std::runtime_error("windows.csv: bad direction '" + s + "'");
}

}  // namespace

std::string format_double(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  if (ec != std::errc{}) throw std::runtime_error("format_double failed");
  return std::string(buf, ptr);
}

void write_trace(const std::filesystem::path& dir, const sim::SimTrace& trace, const nlohmann::json& config_echo) {
  std::filesystem::create_directories(dir);
  {
    auto os = open_out(dir / "cores.csv");
    os << kCoresHeader << '\n';
    for (const auto& s : trace.cores)
      os << format_double(s.time) << ',' << s.core << ',' << format_double(s.speed_mhz) << ','
         << format_double(s.load) << ',' << format_double(s.temp) << '\n';
  }
  {
    auto os = open_out(dir / "tasks.csv");
    os << kTasksHeader << '\n';
    for (const auto& t : trace.tasks)
      os << t.id << ',' << t.program << ',' << t.p1 << ',' << t.p2 << ','
         << (t.deadline ? format_double(*t.deadline) : "none") << ',' << format_double(t.arrival) << ','
         << opt(t.matched) << ',' << opt(t.start) << ',' << opt(t.finish) << ',' << opt(t.waiting()) << ','
         << format_double(t.charged) << ',' << opt(t.core) << ',' << format_double(t.duration) << '\n';
  }
  {
    auto os = open_out(dir / "windows.csv");
    os << kWindowsHeader << '\n';
    for (const auto& w : trace.windows)
      os << w.index << ',' << format_double(w.size) << ',' << format_double(w.awp) << ',' << format_double(w.amp)
         << ',' << to_string(w.direction) << '\n';
  }
  nlohmann::ordered_json summary;
  summary["scheduler"] = trace.scheduler;
  summary["seed"] = trace.seed;
  summary["end_time_s"] = trace.end_time;
  summary["completed"] = trace.completed;
  summary["tasks"] = trace.tasks.size();
  summary["windows"] = trace.windows.size();
  summary["config"] = config_echo;
  auto os = open_out(dir / "summary.json");
  os << summary.dump(2) << '\n';
}

sim::SimTrace read_trace(const std::filesystem::path& dir) {
  sim::SimTrace trace;
  {
    std::ifstream is(dir / "summary.json");
    if (!is) throw std::runtime_error("cannot read " + (dir / "summary.json").string());
    const auto j = nlohmann::json::parse(is);
    trace.scheduler = j.at("scheduler").get<std::string>();
    trace.seed = j.at("seed").get<std::uint64_t>();
    trace.end_time = j.at("end_time_s").get<double>();
    trace.completed = j.at("completed").get<bool>();
  }
  for (const auto& r : read_csv(dir / "cores.csv", kCoresHeader)) {
    if (r.size() != 5) throw std::runtime_error("cores.csv: expected 5 fields");
    trace.cores.push_back({to_double(r[0], "cores.csv"), static_cast<std::uint32_t>(std::stoul(r[1])),
                           to_double(r[2], "cores.csv"), to_double(r[3], "cores.csv"), to_double(r[4], "cores.csv")});
  }
  for (const auto& r : read_csv(dir / "tasks.csv", kTasksHeader)) {
    if (r.size() != 13) throw std::runtime_error("tasks.csv: expected 13 fields");
    sim::TaskRecord t;
    t.id = std::stoull(r[0]);
    t.program = r[1];
    t.p1 = std::stoi(r[2]);
    t.p2 = std::stoi(r[3]);
    t.deadline = opt_double(r[4], "tasks.csv");
    t.arrival = to_double(r[5], "tasks.csv");
    t.matched = opt_double(r[6], "tasks.csv");
    t.start = opt_double(r[7], "tasks.csv");
    t.finish = opt_double(r[8], "tasks.csv");
    t.charged = to_double(r[10], "tasks.csv");
    if (!r[11].empty()) t.core = static_cast<std::uint32_t>(std::stoul(r[11]));
    t.duration = to_double(r[12], "tasks.csv");
    trace.tasks.push_back(std::move(t));
  }
  for (const auto& r : read_csv(dir / "windows.csv", kWindowsHeader)) {
    if (r.size() != 5) throw std::runtime_error("windows.csv: expected 5 fields");
    WindowRecord w;
    w.index = std::stoul(r[0]);
    w.size = to_double(r[1], "windows.csv");
    w.awp = to_double(r[2], "windows.csv");
    w.amp = to_double(r[3], "windows.csv");
    w.direction = parse_direction(r[4]);
    trace.windows.push_back(w);
  }
  return trace;
}

}  // namespace npdw::io
