#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <random>
#include <stdexcept>

#include "npdw/metrics.hpp"
#include "npdw/trace_io.hpp"
#include "npdw/workload.hpp"

using namespace npdw;
using namespace npdw::metrics;

namespace {

sim::TaskRecord task(std::uint64_t id, double arrival, double wait) {
  sim::TaskRecord r;
  r.id = id;
  r.program = "sieve";
  r.arrival = arrival;
  r.matched = arrival + wait;
  r.start = arrival + wait;
  r.finish = arrival + wait + 1.0;
  r.core = 1;
  r.duration = 1.0;
  return r;
}

// Two sampling instants; every core holds its load and temperature constant.
sim::SimTrace flat_trace(const std::vector<double>& loads, const std::vector<double>& temps,
                         const std::vector<double>& waits) {
  sim::SimTrace t;
  t.scheduler = "fcfs";
  for (double time : {1.0, 2.0})
    for (std::size_t c = 0; c < loads.size(); ++c)
      t.cores.push_back({time, static_cast<std::uint32_t>(c + 1), 2400.0, loads[c], temps[c]});
  for (std::size_t i = 0; i < waits.size(); ++i) t.tasks.push_back(task(i + 1, static_cast<double>(i), waits[i]));
  t.end_time = 3.0;
  return t;
}

double variance_oracle(const std::vector<double>& xs) {
  // Two-pass sum of squared pairwise differences: var = sum_{i<j} (xi - xj)^2 / n^2.
  double s = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i)
    for (std::size_t j = i + 1; j < xs.size(); ++j) s += (xs[i] - xs[j]) * (xs[i] - xs[j]);
  const auto n = static_cast<double>(xs.size());
  return s / (n * n);
}

}  // namespace

TEST_CASE("load spread example") {
  const auto m = compute_metrics(flat_trace({0.1, 0.2, 0.3, 0.4}, {40, 40, 40, 40}, {1.0, 2.0}));
  CHECK(m.load_stddev == doctest::Approx(std::sqrt(125.0)).epsilon(1e-12));
  CHECK(m.load_stddev == doctest::Approx(std::sqrt(variance_oracle({10, 20, 30, 40}))).epsilon(1e-12));
  CHECK(m.avg_utilization == doctest::Approx(25.0));
  CHECK(m.thermal_stddev == 0.0);
  CHECK(m.avg_temperature == doctest::Approx(40.0));
}

TEST_CASE("identical cores and constant waits give zero spread") {
  const auto m = compute_metrics(flat_trace({0.5, 0.5, 0.5}, {55, 55, 55}, {2.0, 2.0, 2.0}));
  CHECK(m.load_stddev == 0.0);
  CHECK(m.thermal_stddev == 0.0);
  CHECK(m.waiting_cv == 0.0);
}

TEST_CASE("thermal spread example") {
  const auto m = compute_metrics(flat_trace({0.5, 0.5}, {40, 60}, {1.0, 3.0}));
  CHECK(m.thermal_stddev == doctest::Approx(10.0));
  CHECK(m.avg_temperature == doctest::Approx(50.0));
  CHECK(m.waiting_cv == doctest::Approx(0.5));
}

TEST_CASE("property: population stddev matches a pairwise oracle") {
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> x(-100.0, 100.0);
  for (int trial = 0; trial < 1000; ++trial) {
    std::vector<double> xs(1 + rng() % 20);
    for (auto& v : xs) v = x(rng);
    REQUIRE(pstdev(xs) == doctest::Approx(std::sqrt(variance_oracle(xs))).epsilon(1e-9));
  }
}

TEST_CASE("property: waiting CV is scale invariant") {
  std::mt19937_64 rng(19);
  std::uniform_real_distribution<double> w(0.01, 50.0);
  std::uniform_real_distribution<double> k(0.1, 100.0);
  for (int trial = 0; trial < 1000; ++trial) {
    std::vector<double> waits(2 + rng() % 10);
    for (auto& v : waits) v = w(rng);
    const double scale = k(rng);
    auto scaled = waits;
    for (auto& v : scaled) v *= scale;
    const auto a = compute_metrics(flat_trace({0.5}, {40}, waits));
    const auto b = compute_metrics(flat_trace({0.5}, {40}, scaled));
    REQUIRE(b.waiting_cv == doctest::Approx(a.waiting_cv).epsilon(1e-9));
  }
}

TEST_CASE("degenerate traces are rejected") {
  sim::SimTrace empty;
  CHECK_THROWS_AS(compute_metrics(empty), MetricsError);
  CHECK_THROWS_AS(compute_metrics(flat_trace({0.5}, {40}, {1.0})), MetricsError);
  CHECK_THROWS_AS(compute_metrics(flat_trace({0.5}, {40}, {0.0, 0.0})), MetricsError);
  CHECK_THROWS_AS(mean(std::vector<double>{}), MetricsError);
}

TEST_CASE("comparison tables") {
  TrialRow a{"t1", {{SchedulerKind::Npdw, {}}, {SchedulerKind::Fcfs, {}}}};
  TrialRow b{"t2", {{SchedulerKind::Npdw, {}}}};
  CHECK_THROWS_AS(render_comparison(std::vector<TrialRow>{}, TableFormat::Csv), std::invalid_argument);
  CHECK_THROWS_AS(render_comparison(std::vector<TrialRow>{a, b}, TableFormat::Text), std::invalid_argument);
  const auto csv = render_comparison(std::vector<TrialRow>{a}, TableFormat::Csv);
  CHECK(csv.find("NPDW,FCFS") != std::string::npos);
  const auto json = render_comparison(std::vector<TrialRow>{a}, TableFormat::Json);
  CHECK(json.find("waiting_cv") != std::string::npos);
  CHECK(parse_format("text") == TableFormat::Text);
  CHECK_THROWS_AS(parse_format("xml"), std::invalid_argument);
}

TEST_CASE("a trace written to disk reads back with identical metrics") {
  sim::WorkloadSpec spec;
  spec.horizon = 60;
  spec.seed = 3;
  sim::SimConfig cfg;
  const auto tasks = sim::materialize_tasks(sim::generate_workload(spec), cfg, CreditConfig{});
  const auto trace = run_trial(SchedulerKind::Npdw, cfg, tasks);

  const auto dir = std::filesystem::temp_directory_path() / "npdw_metrics_roundtrip";
  std::filesystem::remove_all(dir);
  io::write_trace(dir, trace, nlohmann::json::object());
  const auto back = io::read_trace(dir);
  CHECK(back.cores == trace.cores);
  CHECK(back.tasks == trace.tasks);
  CHECK(back.end_time == trace.end_time);
  // windows.csv carries only the index, size, AWP, AMP and direction columns.
  REQUIRE(back.windows.size() == trace.windows.size());
  for (std::size_t i = 0; i < trace.windows.size(); ++i) {
    CHECK(back.windows[i].index == trace.windows[i].index);
    CHECK(back.windows[i].size == trace.windows[i].size);
    CHECK(back.windows[i].awp == trace.windows[i].awp);
    CHECK(back.windows[i].amp == trace.windows[i].amp);
    CHECK(back.windows[i].direction == trace.windows[i].direction);
  }
  CHECK(compute_metrics(back) == compute_metrics(trace));
  std::filesystem::remove_all(dir);
}
