#include "npdw/workload.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <fstream>
#include <random>
#include <sstream>
#include <stdexcept>

#include "npdw/trace_io.hpp"

namespace npdw::sim {

namespace {

const std::array<ProgramProfile, 13> kPrograms{{
    {"sieve", 1, 1, 2.0},
    {"gray_code", 1, 1, 1.5},
    {"approx_pi", 2, 2, 3.0},
    {"fibonacci", 1, 1, 2.5},
    {"matrix_multiply", 3, 3, 4.0},
    {"add_int", 1, 1, 1.0},
    {"sub_int", 1, 1, 1.0},
    {"mul_int", 1, 2, 1.2},
    {"div_int", 2, 2, 1.6},
    {"add_double", 1, 2, 1.1},
    {"sub_double", 1, 2, 1.1},
    {"mul_double", 1, 2, 1.3},
    {"div_double", 2, 2, 1.8},
}};

constexpr std::string_view kHeader = "arrival_time_s,program_id,deadline_s";

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

double parse_double(std::string_view s, std::size_t line) {
  s = trim(s);
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || ptr != s.data() + s.size() || !std::isfinite(v))
    throw std::runtime_error("workload line " + std::to_string(line) + ": bad number '" + std::string(s) + "'");
  return v;
}

}  // namespace

std::span<const ProgramProfile> builtin_programs() { return kPrograms; }

const ProgramProfile& find_program(std::string_view id) {
  for (const auto& p : kPrograms)
    if (p.id == id) return p;
  throw std::invalid_argument("unknown program '" + std::string(id) + "'");
}

void WorkloadSpec::validate() const {
  if (!(rate > 0.0)) throw std::invalid_argument("workload.rate must be > 0");
  if (!(horizon > 0.0)) throw std::invalid_argument("workload.horizon must be > 0");
  if (!(deadline_probability >= 0.0 && deadline_probability <= 1.0))
    throw std::invalid_argument("workload.deadline_probability must lie in [0, 1]");
  if (!(slack_min > 0.0) || !(slack_max >= slack_min))
    throw std::invalid_argument("workload slack must satisfy 0 < slack_min <= slack_max");
}

std::vector<WorkloadRecord> generate_workload(const WorkloadSpec& spec) {
  spec.validate();
  std::mt19937_64 rng(spec.seed);
  std::exponential_distribution<double> gap(spec.rate);
  std::uniform_int_distribution<std::size_t> pick(0, kPrograms.size() - 1);
  std::bernoulli_distribution has_deadline(spec.deadline_probability);
  std::uniform_real_distribution<double> slack(spec.slack_min, spec.slack_max);

  std::vector<WorkloadRecord> out;
  double t = 0.0;
  for (;;) {
    t += gap(rng);
    if (t > spec.horizon) break;
    const auto& prog = kPrograms[pick(rng)];
    WorkloadRecord r{t, prog.id, std::nullopt};
    if (has_deadline(rng)) r.deadline = t + slack(rng) * prog.base_duration;
    out.push_back(std::move(r));
  }
  return out;
}

void write_workload(std::ostream& os, std::span<const WorkloadRecord> records) {
  os << kHeader << '\n';
  for (const auto& r : records) {
    os << io::format_double(r.arrival_time) << ',' << r.program << ','
       << (r.deadline ? io::format_double(*r.deadline) : std::string("none")) << '\n';
  }
}

void write_workload(const std::filesystem::path& path, std::span<const WorkloadRecord> records) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot write " + path.string());
  write_workload(os, records);
}

std::vector<WorkloadRecord> read_workload(std::istream& is) {
  std::string line;
  std::size_t line_no = 1;
  if (!std::getline(is, line) || trim(line) != kHeader)
    throw std::runtime_error("workload: expected header '" + std::string(kHeader) + "'");
  std::vector<WorkloadRecord> out;
  while (std::getline(is, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    std::vector<std::string_view> fields;
    std::string_view rest = line;
    for (;;) {
      const auto comma = rest.find(',');
      fields.push_back(trim(rest.substr(0, comma)));
      if (comma == std::string_view::npos) break;
      rest.remove_prefix(comma + 1);
    }
    if (fields.size() != 3)
      throw std::runtime_error("workload line " + std::to_string(line_no) + ": expected 3 fields");
    WorkloadRecord r;
    r.arrival_time = parse_double(fields[0], line_no);
    if (r.arrival_time < 0.0) throw std::runtime_error("workload line " + std::to_string(line_no) + ": negative arrival");
    r.program = std::string(fields[1]);
    find_program(r.program);
    if (fields[2] != "none") r.deadline = parse_double(fields[2], line_no);
    if (!out.empty() && r.arrival_time < out.back().arrival_time)
      throw std::runtime_error("workload line " + std::to_string(line_no) + ": arrivals must be nondecreasing");
    out.push_back(std::move(r));
  }
  return out;
}

std::vector<WorkloadRecord> read_workload(const std::filesystem::path& path) {
  std::ifstream is(path);
  if (!is) throw std::runtime_error("cannot read " + path.string());
  return read_workload(is);
}

std::vector<SimTask> materialize_tasks(std::span<const WorkloadRecord> records, const SimConfig& sim,
                                       const CreditConfig& credit) {
  std::mt19937_64 rng(sim.seed ^ 0x9e3779b97f4a7c15ULL);
  const double sigma = sim.duration_sigma;
  std::lognormal_distribution<double> factor(-0.5 * sigma * sigma, sigma);
  std::vector<SimTask> out;
  out.reserve(records.size());
  std::uint64_t next_id = 1;
  for (const auto& r : records) {
    const auto& prog = find_program(r.program);
    SimTask t;
    t.profile = make_task(TaskId{next_id++}, prog.p1, prog.p2, r.deadline, r.arrival_time, credit);
    t.program = prog.id;
    const double base = prog.base_duration * sim.duration_scale;
    t.duration = sigma > 0.0 ? base * factor(rng) : base;
    t.power_intensity = static_cast<double>(prog.p2);
    out.push_back(std::move(t));
  }
  return out;
}

}  // namespace npdw::sim
