#include "npdw/schedulers.hpp"

#include <algorithm>
#include <cctype>
#include <limits>
#include <stdexcept>
#include <string>

namespace npdw {

namespace {

// Greedy non-preemptive baseline: whenever a core is idle, hand it the
// highest-priority waiting task. Cores are filled in ascending id order.
class PriorityScheduler final : public Scheduler {
 public:
  explicit PriorityScheduler(SchedulerKind kind) : kind_(kind) {}

  void decide(sim::World& world) override {
    auto idle = world.idle_cores();
    if (idle.empty() || world.waiting().empty()) return;

    std::vector<TaskProfile> queue(world.waiting().begin(), world.waiting().end());
    std::stable_sort(queue.begin(), queue.end(), [&](const TaskProfile& a, const TaskProfile& b) { return before(a, b); });

    Matching m;
    m.time = world.now();
    const auto n = std::min(idle.size(), queue.size());
    for (std::size_t i = 0; i < n; ++i) m.edges.push_back({queue[i].id, idle[i]});
    std::sort(m.edges.begin(), m.edges.end());
    world.dispatch(m, world.waiting().size());
  }

  void on_finished(sim::World&, std::span<const sim::Completion>) override {}

 private:
  bool before(const TaskProfile& a, const TaskProfile& b) const {
    switch (kind_) {
      case SchedulerKind::Edf: {
        constexpr double inf = std::numeric_limits<double>::infinity();
        const double da = a.deadline.value_or(inf);
        const double db = b.deadline.value_or(inf);
        if (da != db) return da < db;
        break;
      }
      case SchedulerKind::Sjf:
        if (a.p1 != b.p1) return a.p1 < b.p1;
        break;
      default:
        break;
    }
    if (a.arrival_time != b.arrival_time) return a.arrival_time < b.arrival_time;
    return a.id < b.id;
  }

  SchedulerKind kind_;
};

}  // namespace

std::string_view to_string(SchedulerKind kind) {
  switch (kind) {
    case SchedulerKind::Npdw: return "npdw";
    case SchedulerKind::Fcfs: return "fcfs";
    case SchedulerKind::Edf: return "edf";
    case SchedulerKind::Sjf: return "sjf";
  }
  return "";
}

SchedulerKind parse_scheduler(std::string_view name) {
  std::string lower(name);
  std::transform(lower.begin(), lower.end(), lower.begin(), [](unsigned char c) { return std::tolower(c); });
  for (auto k : kAllSchedulers)
    if (to_string(k) == lower) return k;
  throw std::invalid_argument("unknown scheduler '" + std::string(name) + "' (expected npdw, fcfs, edf or sjf)");
}

void SchedulerConfig::validate() const {
  credit.validate();
  affinity.validate();
  perf.validate();
  window.validate();
}

std::unique_ptr<Scheduler> make_scheduler(SchedulerKind kind, const SchedulerConfig& cfg) {
  if (kind == SchedulerKind::Npdw) return make_npdw_scheduler(cfg);
  return std::make_unique<PriorityScheduler>(kind);
}

sim::SimTrace run_trial(SchedulerKind kind, const sim::SimConfig& sim_cfg, std::vector<sim::SimTask> tasks,
                        const SchedulerConfig& cfg) {
  cfg.validate();
  sim::World world(sim_cfg, std::move(tasks));
  auto scheduler = make_scheduler(kind, cfg);

  const double give_up = world.last_arrival_time() + sim_cfg.stall_limit;
  while (!world.finished() && world.now() <= give_up) {
    world.inject_arrivals();
    scheduler->decide(world);
    const auto done = world.step();
    scheduler->on_finished(world, done);
  }
  auto trace = world.take_trace(std::string(to_string(kind)));
  trace.windows = scheduler->window_history();
  return trace;
}

sim::SimTrace npdw_run(const sim::SimConfig& sim_cfg, std::vector<sim::SimTask> tasks, const SchedulerConfig& cfg) {
  return run_trial(SchedulerKind::Npdw, sim_cfg, std::move(tasks), cfg);
}

sim::SimTrace fcfs_run(const sim::SimConfig& sim_cfg, std::vector<sim::SimTask> tasks) {
  return run_trial(SchedulerKind::Fcfs, sim_cfg, std::move(tasks));
}

sim::SimTrace edf_run(const sim::SimConfig& sim_cfg, std::vector<sim::SimTask> tasks) {
  return run_trial(SchedulerKind::Edf, sim_cfg, std::move(tasks));
}

sim::SimTrace sjf_run(const sim::SimConfig& sim_cfg, std::vector<sim::SimTask> tasks) {
  return run_trial(SchedulerKind::Sjf, sim_cfg, std::move(tasks));
}

}  // namespace npdw
