#pragma once

#include <memory>
#include <span>
#include <string_view>
#include <vector>

#include "npdw/matching.hpp"
#include "npdw/sim.hpp"
#include "npdw/task_model.hpp"
#include "npdw/windowing.hpp"

namespace npdw {

enum class SchedulerKind { Npdw, Fcfs, Edf, Sjf };

std::string_view to_string(SchedulerKind kind);
SchedulerKind parse_scheduler(std::string_view name);
/// Report column order.
inline constexpr SchedulerKind kAllSchedulers[] = {SchedulerKind::Npdw, SchedulerKind::Fcfs, SchedulerKind::Sjf,
                                                    SchedulerKind::Edf};

struct SchedulerConfig {
  CreditConfig credit;
  AffinityConfig affinity;
  PerfConstants perf;
  WindowTuning window;

  void validate() const;
};

class Scheduler {
 public:
  virtual ~Scheduler() = default;

  /// Called once per tick after arrivals are injected.
  virtual void decide(sim::World& world) = 0;
  /// Called after a tick with the tasks that completed during it.
  virtual void on_finished(sim::World& world, std::span<const sim::Completion> done) = 0;
  virtual std::vector<WindowRecord> window_history() const { return {}; }
};

std::unique_ptr<Scheduler> make_scheduler(SchedulerKind kind, const SchedulerConfig& cfg);

/// Runs `tasks` to completion (or the stall limit) under one scheduler.
sim::SimTrace run_trial(SchedulerKind kind, const sim::SimConfig& sim_cfg, std::vector<sim::SimTask> tasks,
                        const SchedulerConfig& cfg = {});

sim::SimTrace npdw_run(const sim::SimConfig& sim_cfg, std::vector<sim::SimTask> tasks, const SchedulerConfig& cfg = {});
sim::SimTrace fcfs_run(const sim::SimConfig& sim_cfg, std::vector<sim::SimTask> tasks);
sim::SimTrace edf_run(const sim::SimConfig& sim_cfg, std::vector<sim::SimTask> tasks);
sim::SimTrace sjf_run(const sim::SimConfig& sim_cfg, std::vector<sim::SimTask> tasks);

/// Implemented in npdw_scheduler.cpp.
std::unique_ptr<Scheduler> make_npdw_scheduler(const SchedulerConfig& cfg);

}  // namespace npdw
