#include "npdw/compare.hpp"

#include "npdw/trace_io.hpp"

namespace npdw {

TrialResult run_comparison_trial(const std::string& name, std::span<const sim::WorkloadRecord> workload,
                                 const RunConfig& cfg, std::span<const SchedulerKind> kinds) {
  cfg.validate();
  const auto tasks = sim::materialize_tasks(workload, cfg.sim, cfg.scheduler.credit);
  TrialResult out;
  out.row.trial = name;
  for (auto kind : kinds) {
    auto trace = run_trial(kind, cfg.sim, tasks, cfg.scheduler);
    out.row.by_scheduler[kind] = metrics::compute_metrics(trace);
    out.traces.emplace(kind, std::move(trace));
  }
  return out;
}

void write_trial(const std::filesystem::path& dir, const TrialResult& trial, const RunConfig& cfg) {
  const auto echo = to_json(cfg);
  for (const auto& [kind, trace] : trial.traces) io::write_trace(dir / std::string(to_string(kind)), trace, echo);
}

}  // namespace npdw
