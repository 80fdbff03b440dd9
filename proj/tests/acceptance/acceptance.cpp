// Acceptance runner: one PASS/FAIL line per criterion, non-zero exit on any failure.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "npdw/asm_analyzer.hpp"
#include "npdw/compare.hpp"
#include "npdw/config.hpp"
#include "npdw/matching.hpp"
#include "npdw/metrics.hpp"
#include "npdw/schedulers.hpp"
#include "npdw/sim.hpp"
#include "npdw/task_model.hpp"
#include "npdw/windowing.hpp"
#include "npdw/workload.hpp"

using namespace npdw;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

int failures = 0;

void run(const std::string& id, double limit_s, const std::function<Outcome()>& body) {
  const auto t0 = std::chrono::steady_clock::now();
  Outcome out;
  try {
    out = body();
  } catch (const std::exception& e) {
    out = {false, std::string("exception: ") + e.what()};
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  const bool in_time = secs < limit_s;
  const bool pass = out.pass && in_time;
  if (!pass) ++failures;
  std::printf("%s %-4s %s [%.2f s / limit %.0f s%s]\n", pass ? "PASS" : "FAIL", id.c_str(), out.detail.c_str(), secs,
              limit_s, in_time ? "" : ", too slow");
  std::fflush(stdout);
}

std::string read_file(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw std::runtime_error("cannot open " + path);
  std::ostringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

bool near(double a, double b, double tol = 1e-9) { return std::abs(a - b) <= tol; }

// Collects named formula checks and reports the first mismatch.
struct Ledger {
  int total = 0;
  std::vector<std::string> bad;
  void check(bool ok, const std::string& what) {
    ++total;
    if (!ok) bad.push_back(what);
  }
  Outcome outcome(const std::string& label) const {
    std::ostringstream os;
    os << label << ": " << (total - static_cast<int>(bad.size())) << "/" << total << " ok";
    if (!bad.empty()) os << ", first failure: " << bad.front();
    return {bad.empty(), os.str()};
  }
};

// Independent blocking-pair check straight from the rank tables.
bool blocking_free(const PreferenceLists& p, const Matching& m) {
  auto rank = [](const auto& list, auto x) {
    return static_cast<std::size_t>(std::find(list.begin(), list.end(), x) - list.begin());
  };
  for (auto u : p.tasks) {
    const auto& up = p.task_prefs.at(u);
    const auto mine = m.core_of(u);
    for (auto v : up) {
      if (mine && rank(up, v) >= rank(up, *mine)) break;
      const auto holder = m.task_of(v);
      const auto& vp = p.core_prefs.at(v);
      if (!holder || rank(vp, u) < rank(vp, *holder)) return false;
    }
  }
  return true;
}

PreferenceLists random_instance(std::mt19937_64& rng, std::size_t nu, std::size_t nv) {
  PreferenceLists p;
  for (std::size_t i = 1; i <= nu; ++i) p.tasks.push_back(TaskId{i});
  for (std::size_t j = 1; j <= nv; ++j) p.cores.push_back(CoreId{static_cast<std::uint32_t>(j)});
  for (auto u : p.tasks) {
    auto l = p.cores;
    std::shuffle(l.begin(), l.end(), rng);
    p.task_prefs[u] = l;
  }
  for (auto v : p.cores) {
    auto l = p.tasks;
    std::shuffle(l.begin(), l.end(), rng);
    p.core_prefs[v] = l;
  }
  return p;
}

CoreState core(std::uint32_t id, double speed, double load, int temp) {
  CoreState c;
  c.id = CoreId{id};
  c.speed_mhz = speed;
  c.load = load;
  c.temp_category = temp;
  c.max_speed_mhz = 2400.0;
  c.raw_temp = 40.0;
  return c;
}

TaskProfile task(std::uint64_t id, int p1, int p2, std::optional<double> deadline, double credit) {
  TaskProfile t;
  t.id = TaskId{id};
  t.p1 = p1;
  t.p2 = p2;
  t.deadline = deadline;
  t.credit = credit;
  return t;
}

struct Seeded {
  std::uint64_t seed;
  std::vector<sim::WorkloadRecord> workload;
};

std::vector<Seeded> trend_workloads(const RunConfig& cfg) {
  std::vector<Seeded> out;
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    auto spec = cfg.workload;
    spec.seed = seed;
    out.push_back({seed, sim::generate_workload(spec)});
  }
  return out;
}

double median(std::vector<double> xs) {
  std::sort(xs.begin(), xs.end());
  const auto n = xs.size();
  return n % 2 ? xs[n / 2] : 0.5 * (xs[n / 2 - 1] + xs[n / 2]);
}

}  // namespace

int main() {
  const std::string data = NPDW_DATA_DIR;
  const RunConfig defaults = load_config(data + "/default.toml");

  run("1a", 1.0, [&] {
    const auto r = analysis::analyze(read_file(data + "/scalar_product.s"));
    using analysis::OpcodeCategory;
    const bool counts = r.count(OpcodeCategory::C1) == 5 && r.count(OpcodeCategory::C3) == 1 &&
                        r.count(OpcodeCategory::C6) == 5 && r.count(OpcodeCategory::C7) == 4;
    const bool avg = std::abs(r.avg_time_cost - 1.002) <= 0.0005;
    std::ostringstream os;
    os << "scalar product: C1=" << r.count(OpcodeCategory::C1) << " C3=" << r.count(OpcodeCategory::C3)
       << " C6=" << r.count(OpcodeCategory::C6) << " C7=" << r.count(OpcodeCategory::C7)
       << " avg time cost=" << r.avg_time_cost << " (want 5/1/5/4, 1.002 +- 0.0005)";
    return Outcome{counts && avg, os.str()};
  });

  run("1b", 1.0, [&] {
    const auto j = nlohmann::json::parse(read_file(data + "/five_task_preferences.json"));
    PreferenceLists p;
    for (const auto& [k, v] : j.at("task_preferences").items()) {
      TaskId u{std::stoull(k)};
      p.tasks.push_back(u);
      for (int c : v) p.task_prefs[u].push_back(CoreId{static_cast<std::uint32_t>(c)});
    }
    for (const auto& [k, v] : j.at("core_preferences").items()) {
      CoreId c{static_cast<std::uint32_t>(std::stoul(k))};
      p.cores.push_back(c);
      for (int u : v) p.core_prefs[c].push_back(TaskId{static_cast<std::uint64_t>(u)});
    }
    const auto r = gale_shapley(p);
    const std::vector<Edge> want{{TaskId{1}, CoreId{3}}, {TaskId{2}, CoreId{2}}, {TaskId{3}, CoreId{1}},
                                 {TaskId{4}, CoreId{4}}};
    bool proposals = true;
    for (const auto& e : want) {
      const bool seen = std::any_of(r.proposals.begin(), r.proposals.end(), [&](const Proposal& pr) {
        return pr.task == e.task && pr.core == e.core && pr.accepted;
      });
      proposals = proposals && seen;
    }
    const bool five_free = !r.matching.core_of(TaskId{5});
    std::ostringstream os;
    os << "five-task example matching:";
    for (const auto& e : r.matching.edges) os << " (" << e.task << "," << e.core << ")";
    os << ", task 5 " << (five_free ? "unmatched" : "matched") << ", accepting proposals "
       << (proposals ? "present" : "missing");
    return Outcome{r.matching.edges == want && five_free && proposals, os.str()};
  });

  run("2", 5.0, [&] {
    Ledger l;
    // Credit.
    CreditConfig cc;
    cc.base_credit = 10;
    cc.gain_rate = 2;
    auto t = make_task(TaskId{1}, 1, 1, std::nullopt, 0.0, cc);
    l.check(near(t.credit, 10.0), "base credit");
    l.check(near(accumulate_credit(t, 3.0, cc).credit, 2.0 * 3.0 + 10.0), "accumulation");
    t.credit = 90;
    const auto spent = spend_credit(t, 3);
    l.check(near(spent.charged, 90.0 * (1.0 - 1.0 / 3.0)), "charge");
    l.check(near(spent.task.credit, 90.0 / 3.0), "remaining credit");
    l.check(near(spend_credit(t, 1).charged, 0.0), "single-task charge");
    // Task and core weights, affinity.
    l.check(near(task_weight(task(1, 2, 1, {}, 0)), (2.0 + 1.0) / 6.0), "task weight");
    const std::vector<CoreState> cs{core(1, 2400, 0.0, 1), core(2, 1800, 1.0, 3)};
    l.check(near(core_weight(cs[0], cs), (2400.0 / 2400.0 + (1.0 - 0.0) + (3.0 - 1.0) / 3.0) / 3.0), "core weight fast");
    l.check(near(core_weight(cs[1], cs), (1800.0 / 2400.0 + 0.0 + 0.0) / 3.0), "core weight slow");
    const std::vector<TaskProfile> one{task(1, 2, 2, {}, 0)};
    const std::vector<CoreState> ideal{core(1, 2400, 0.0, 3)};
    AffinityConfig beta1;
    beta1.beta = 1.0;
    l.check(near(matching_affinity(one[0], ideal[0], one, ideal, beta1), 1.0), "affinity of a perfect fit");
    // Window metrics.
    const std::vector<CoreState> three{core(1, 2400, 0.2, 1), core(2, 1200, 0.6, 1), core(3, 1800, 1.0, 1)};
    l.check(near(utilization_throughput(three), (0.2 + 0.6 + 1.0) / 3.0), "UT");
    l.check(near(operating_throughput(three), (1.0 + 0.5 + 0.75) / 3.0), "OT");
    l.check(near(window_performance(0.6, 1.0), 0.5 * 1.0 + 0.5 * 0.6), "WP");
    l.check(near(matching_performance(std::vector<double>{0.0, 2.0}, 4.0), (4.0 + 2.0) / 2.0), "MP");
    // Resize.
    l.check(near(resize_ratio(0.4, 0.8, 2.0, 1.0), 0.5 * (0.8 / 0.4 + 2.0 / 1.0)), "ratio");
    l.check(near(next_window_size(1.0, 2.0, 0.5, 0.6, 1.0, 1.0), 2.0 * 0.5 * (0.6 / 0.5 + 1.0)), "grow case");
    l.check(near(next_window_size(4.0, 2.0, 0.75, 0.5, 1.0, 0.9), 2.0 / 2.0 * (0.75 / 0.5 + 0.9 / 1.0)), "shrink case");
    l.check(near(next_window_size(1.0, 20.0, 0.1, 1.0, 1.0, 1.0), 30.0), "upper clamp");
    // Cutoff from a type-7 quantile computed by hand.
    CutoffStats s;
    for (double d : {5.0, 3.0, 8.0, 1.0, 7.0, 2.0, 6.0, 4.0}) s.add(d);
    l.check(near(s.q1(), 2.75) && near(s.q3(), 6.25), "quartiles");
    l.check(near(execution_cutoff(s), 6.25 + 3.0 * (6.25 - 2.75)), "cutoff");
    // Analyzer averages.
    l.check(near(analysis::analyze("call malloc\naddl %eax, %ebx\n").avg_time_cost, (12.30 + 1.00) / 2.0), "avg time");
    l.check(near(analysis::analyze("call malloc\naddl %eax, %ebx\n").avg_power_cost, (21.06 + 1.43) / 2.0),
            "avg power");
    return l.outcome("formula checks to 1e-9");
  });

  run("3", 30.0, [&] {
    std::mt19937_64 rng(2024);
    int bad = 0;
    for (int trial = 0; trial < 1000; ++trial) {
      const std::size_t nu = 1 + rng() % 6;
      const std::size_t nv = 1 + rng() % 6;
      const auto p = random_instance(rng, nu, nv);
      const auto r = gale_shapley(p);
      const bool ok = r.matching.edges.size() == std::min(nu, nv) && blocking_free(p, r.matching) &&
                      r.proposals.size() <= nu * nv;
      if (!ok) ++bad;
    }
    return Outcome{bad == 0, "1000 random instances up to 6x6: " + std::to_string(bad) + " unstable or short"};
  });

  run("4", 120.0, [&] {
    Ledger l;
    std::mt19937_64 rng(99);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    for (int i = 0; i < 1000; ++i) {
      // Credit stays nonnegative and the charge is proportional.
      CreditConfig cc;
      cc.base_credit = 20.0 * unit(rng);
      cc.gain_rate = 0.1 + 3.0 * unit(rng);
      cc.max_rounds = 1000;
      auto t = make_task(TaskId{1}, 1, 1, std::nullopt, 0.0, cc);
      for (int k = 0; k < 10; ++k) t = accumulate_credit(t, 5.0 * unit(rng), cc);
      const std::size_t u = 1 + rng() % 40;
      const auto sp = spend_credit(t, u);
      l.check(sp.task.credit >= 0.0 && near(sp.charged, t.credit * (1.0 - 1.0 / static_cast<double>(u)), 1e-9 * (1 + t.credit)),
              "credit");

      // Affinity in [0, 1].
      std::vector<TaskProfile> ts;
      std::vector<CoreState> cs;
      const auto nt = 1 + rng() % 6, nc = 1 + rng() % 6;
      for (std::size_t k = 0; k < nt; ++k)
        ts.push_back(task(k + 1, 1 + static_cast<int>(rng() % 3), 1 + static_cast<int>(rng() % 3),
                          unit(rng) < 0.5 ? std::optional<double>(10.0 * unit(rng)) : std::nullopt, 50.0 * unit(rng)));
      for (std::size_t k = 0; k < nc; ++k)
        cs.push_back(core(static_cast<std::uint32_t>(k + 1), 2400.0 * (0.1 + 0.9 * unit(rng)), unit(rng),
                          1 + static_cast<int>(rng() % 3)));
      AffinityConfig ac;
      ac.beta = unit(rng);
      bool in_range = true;
      for (const auto& a : ts)
        for (const auto& c : cs) {
          const double m = matching_affinity(a, c, ts, cs, ac);
          in_range = in_range && m >= 0.0 && m <= 1.0;
        }
      l.check(in_range, "affinity range");
      const auto prefs = build_preferences(ts, cs, ac);
      const auto gs = gale_shapley(prefs);
      l.check(blocking_free(prefs, gs.matching) && gs.matching.edges.size() == std::min(nt, nc), "matching");

      // Window size stays positive and within the clamp.
      auto pos = [&] { return 0.01 + 10.0 * unit(rng); };
      const double n = next_window_size(pos(), pos(), unit(rng) + 1e-3, unit(rng) + 1e-3, pos(), pos());
      l.check(n >= 0.01 && n <= 30.0, "window bounds");
    }

    // Determinism on a 200-task workload.
    auto spec = defaults.workload;
    spec.seed = 200;
    auto wl = sim::generate_workload(spec);
    wl.resize(std::min<std::size_t>(200, wl.size()));
    const auto tasks = sim::materialize_tasks(wl, defaults.sim, defaults.scheduler.credit);
    for (auto kind : kAllSchedulers) {
      const auto a = run_trial(kind, defaults.sim, tasks, defaults.scheduler);
      const auto b = run_trial(kind, defaults.sim, tasks, defaults.scheduler);
      l.check(a == b && a.tasks.size() == 200, std::string("determinism ") + std::string(to_string(kind)));
    }
    return l.outcome("1000-case properties and 200-task determinism");
  });

  const auto workloads = trend_workloads(defaults);

  run("5", 120.0, [&] {
    int ok = 0;
    std::ostringstream os;
    for (const auto& w : workloads) {
      const auto tasks = sim::materialize_tasks(w.workload, defaults.sim, defaults.scheduler.credit);
      const auto trace = npdw_run(defaults.sim, tasks, defaults.scheduler);
      std::vector<double> sizes;
      for (const auto& rec : trace.windows)
        if (rec.index >= 20) sizes.push_back(rec.size);
      bool pass = w.workload.size() >= 500 && !sizes.empty();
      double lo = 0, hi = 0, med = 0;
      if (!sizes.empty()) {
        lo = *std::min_element(sizes.begin(), sizes.end());
        hi = *std::max_element(sizes.begin(), sizes.end());
        med = median(sizes);
        pass = pass && hi - lo <= 2.0 * med;
      }
      if (pass) ++ok;
      char buf[160];
      std::snprintf(buf, sizeof buf, " seed %llu: n=%zu range=%.3f 2*median=%.3f%s;",
                    static_cast<unsigned long long>(w.seed), w.workload.size(), hi - lo, 2.0 * med, pass ? "" : " out");
      os << buf;
    }
    return Outcome{ok >= 4, "window band in " + std::to_string(ok) + "/5 seeds (need 4):" + os.str()};
  });

  run("6", 300.0, [&] {
    std::vector<metrics::TrialRow> rows;
    for (const auto& w : workloads)
      rows.push_back(run_comparison_trial("seed" + std::to_string(w.seed), w.workload, defaults).row);

    const SchedulerKind baselines[] = {SchedulerKind::Fcfs, SchedulerKind::Sjf, SchedulerKind::Edf};
    auto lower_everywhere = [&](const metrics::TrialRow& r, double metrics::TrialMetrics::*f) {
      const double mine = r.by_scheduler.at(SchedulerKind::Npdw).*f;
      return std::all_of(std::begin(baselines), std::end(baselines),
                         [&](SchedulerKind k) { return mine < r.by_scheduler.at(k).*f; });
    };
    int a = 0, b = 0, c = 0, d = 0;
    for (const auto& r : rows) {
      a += lower_everywhere(r, &metrics::TrialMetrics::load_stddev);
      b += lower_everywhere(r, &metrics::TrialMetrics::thermal_stddev) &&
           lower_everywhere(r, &metrics::TrialMetrics::avg_temperature);
      c += lower_everywhere(r, &metrics::TrialMetrics::waiting_cv);
      double best = 0.0;
      for (auto k : baselines) best = std::max(best, r.by_scheduler.at(k).avg_utilization);
      d += r.by_scheduler.at(SchedulerKind::Npdw).avg_utilization >= best - 15.0;
    }
    std::ostringstream os;
    os << "trends over 5 seeds: load spread " << a << "/5, thermal spread and mean " << b << "/5, waiting CV " << c
       << "/5 (need 4 each), utilization within 15 pp " << d << "/5 (need 5)";
    return Outcome{a >= 4 && b >= 4 && c >= 4 && d == 5, os.str()};
  });

  run("7", 60.0, [&] {
    Ledger l;
    sim::SimConfig cfg;
    cfg.num_cores = 1;
    cfg.throttle_enabled = false;
    auto make = [&](double duration, double power) {
      sim::SimTask t;
      t.profile = make_task(TaskId{1}, 1, 1, std::nullopt, 0.0, CreditConfig{});
      t.program = "probe";
      t.duration = duration;
      t.power_intensity = power;
      return t;
    };
    Matching m;
    m.edges.push_back({TaskId{1}, CoreId{1}});

    sim::World w(cfg, {make(100.0, 3.0)});
    w.inject_arrivals();
    w.dispatch(m, 1);
    double worst = 0.0;
    for (int n = 1; n <= 100; ++n) {
      w.step();
      const double time = n * cfg.tick;
      const double exact =
          cfg.ambient + cfg.heating * 3.0 / cfg.cooling * (1.0 - std::exp(-cfg.cooling * time));
      worst = std::max(worst, std::abs(w.snapshot_cores()[0].raw_temp - exact) / exact);
    }
    l.check(worst <= 0.01, "thermal closed form");

    for (double d : {0.01, 0.015, 0.333, 1.0, 2.5, 7.77}) {
      sim::World cw(cfg, {make(d, 1.0)});
      cw.inject_arrivals();
      cw.dispatch(m, 1);
      std::int64_t ticks = 0;
      while (cw.running_count() > 0) {
        cw.step();
        ++ticks;
      }
      l.check(ticks == static_cast<std::int64_t>(std::ceil(d / cfg.tick - 1e-9)), "ticks for " + std::to_string(d));
    }
    auto out = l.outcome("thermal within 1% of closed form over 100 ticks, exact completion ticks");
    char buf[64];
    std::snprintf(buf, sizeof buf, " (worst relative error %.2e)", worst);
    out.detail += buf;
    return out;
  });

  std::printf("%s: %d criterion(s) failed\n", failures ? "FAIL" : "PASS", failures);
  return failures ? 1 : 0;
}
