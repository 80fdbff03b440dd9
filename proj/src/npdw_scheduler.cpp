#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <stdexcept>
#include <unordered_map>
#include <vector>

#include "npdw/schedulers.hpp"

namespace npdw {

namespace {

constexpr double kEps = 1e-9;

struct Execution {
  int epoch = 0;
  double window_start = 0.0;
  double match_time = 0.0;
  std::vector<TaskId> tasks;
  std::vector<double> arrivals;
  std::vector<bool> finished;
  std::size_t outstanding = 0;
  std::optional<double> end;
  double wp = 0.0;
  double mp = 0.0;
};

struct Reference {
  double size = 0.0;
  double awp = 0.0;
  double amp = 0.0;
};

class NpdwScheduler final : public Scheduler {
 public:
  explicit NpdwScheduler(const SchedulerConfig& cfg) : cfg_(cfg) { cfg_.validate(); }

  void decide(sim::World& world) override {
    if (!started_) {
      if (world.task_count() < 2)
        throw std::invalid_argument("npdw: the workload needs at least two task arrivals to size the first window");
      if (world.waiting().empty()) return;
      initial_matching(world);
      started_ = true;
    }
    if (!sized_) {
      if (!try_size_first_window(world)) return;
    }
    check_cutoff(world);

    const double now = world.now();
    if (!window_start_ && !world.waiting().empty()) window_start_ = now;
    if (window_start_ && now + kEps >= *window_start_ + dt_cur_) close_window(world);
  }

  void on_finished(sim::World& world, std::span<const sim::Completion> done) override {
    for (const auto& c : done) {
      cutoff_.add(c.finish - c.start);
      auto it = owner_.find(c.task);
      if (it == owner_.end()) continue;
      auto& ex = executions_[it->second];
      owner_.erase(it);
      const auto pos = static_cast<std::size_t>(std::find(ex.tasks.begin(), ex.tasks.end(), c.task) - ex.tasks.begin());
      ex.finished[pos] = true;
      if (--ex.outstanding == 0 && !ex.end) finish_execution(world, it_index(ex), c.finish);
    }
    if (first_ && executions_[*first_].end) {
      if (sized_) resize(world);
    }
    check_cutoff(world);
  }

  std::vector<WindowRecord> window_history() const override { return history_; }

 private:
  std::size_t it_index(const Execution& ex) const { return static_cast<std::size_t>(&ex - executions_.data()); }

  // All tasks waiting at the first arrival go straight to the best cores.
  void initial_matching(sim::World& world) {
    t0_ = world.waiting().front().arrival_time;
    match_and_dispatch(world, world.now());
  }

  // The first window is twice the gap between the first two arrivals.
  bool try_size_first_window(sim::World& world) {
    const auto recs = world.records();
    if (recs[1].arrival > world.now() + kEps) return false;
    const double t1 = recs[1].arrival;

    dt_prev_ = clamp_size(t1 - t0_);
    dt_cur_ = clamp_size(2.0 * dt_prev_);
    sized_ = true;
    if (first_ && executions_[*first_].end) resize(world);
    return true;
  }

  double clamp_size(double dt) const { return std::clamp(dt, cfg_.window.min_size, cfg_.window.max_size); }

  void close_window(sim::World& world) {
    const double now = world.now();
    for (auto& t : world.waiting()) {
      const double since = std::max(t.arrival_time, last_boundary_);
      t = accumulate_credit(t, std::max(0.0, now - since), cfg_.credit);
    }
    const double start = *window_start_;
    last_boundary_ = now;
    window_start_.reset();
    if (!world.waiting().empty() && !world.idle_cores().empty()) match_and_dispatch(world, start);
    // Leftover tasks keep accumulating in a window that opens right away.
    if (!world.waiting().empty()) window_start_ = now;
  }

  void match_and_dispatch(sim::World& world, double window_start) {
    const double now = world.now();
    std::vector<TaskProfile> tasks(world.waiting().begin(), world.waiting().end());
    // Deadlines enter the affinity as time remaining, so overdue tasks rank first.
    for (auto& t : tasks)
      if (t.deadline) t.deadline = std::max(0.0, *t.deadline - now);
    const auto cores = world.snapshot_idle_cores();
    const auto prefs = build_preferences(tasks, cores, cfg_.affinity);
    const auto result = gale_shapley(prefs, now);
    if (result.matching.edges.empty()) return;

    Execution ex;
    ex.epoch = epoch_;
    ex.window_start = window_start;
    ex.match_time = now;
    for (const auto& e : result.matching.edges) {
      const auto* t = world.find_waiting(e.task);
      ex.tasks.push_back(e.task);
      ex.arrivals.push_back(t->arrival_time);
    }
    ex.finished.assign(ex.tasks.size(), false);
    ex.outstanding = ex.tasks.size();
    ex.mp = matching_performance(ex.arrivals, now);

    world.dispatch(result.matching, world.waiting().size());

    const auto idx = executions_.size();
    for (auto id : ex.tasks) owner_[id] = idx;
    executions_.push_back(std::move(ex));
    if (!first_) {
      first_ = idx;
      const double cut = execution_cutoff(cutoff_);
      first_deadline_ = std::isfinite(cut) ? now + cut : std::numeric_limits<double>::infinity();
    }
  }

  void finish_execution(sim::World& world, std::size_t idx, double end) {
    auto& ex = executions_[idx];
    ex.end = end;
    const auto tp = world.throughput_between(std::min(ex.window_start, end - kEps), end);
    ex.wp = window_performance(tp.ut, tp.ot, cfg_.perf);
    // Tasks still running when a cutoff ends the window do not count towards
    // its waiting time.
    if (ex.outstanding > 0) {
      std::vector<double> done;
      for (std::size_t i = 0; i < ex.tasks.size(); ++i)
        if (ex.finished[i]) done.push_back(ex.arrivals[i]);
      if (!done.empty()) ex.mp = matching_performance(done, ex.match_time);
    }
  }

  void check_cutoff(sim::World& world) {
    if (!first_) return;
    auto& ex = executions_[*first_];
    if (ex.end || world.now() + kEps < first_deadline_) return;
    finish_execution(world, *first_, world.now());
    if (sized_) resize(world);
  }

  void resize(sim::World&) {
    const auto& first = executions_[*first_];
    const double first_end = *first.end;
    std::vector<ExecutionSample> samples;
    for (const auto& ex : executions_)
      if (ex.epoch == epoch_ && ex.end) samples.push_back({ex.wp, ex.mp, *ex.end});
    const auto folded = fold_awp_amp(samples, first_end);
    const double awp = std::max(folded.awp, 1e-12);

    if (!reference_) reference_ = Reference{dt_prev_, awp, folded.amp};
    const auto& ref = *reference_;
    const auto dir = resize_direction(ref.awp, awp, ref.amp, folded.amp, cfg_.window);
    const double next = next_window_size(ref.size, dt_cur_, ref.awp, awp, ref.amp, folded.amp, cfg_.window);

    WindowRecord rec;
    rec.index = history_.size();
    rec.size = dt_cur_;
    rec.awp = folded.awp;
    rec.amp = folded.amp;
    rec.executions_counted = folded.count;
    rec.start = first.window_start;
    rec.end = first_end;
    rec.direction = dir;
    history_.push_back(rec);

    // Compare against the most recent record of a different size.
    if (next != dt_cur_) reference_ = Reference{dt_cur_, awp, folded.amp};
    dt_prev_ = dt_cur_;
    dt_cur_ = next;

    ++epoch_;
    first_.reset();
    first_deadline_ = std::numeric_limits<double>::infinity();
  }

  SchedulerConfig cfg_;
  bool started_ = false;
  bool sized_ = false;
  double t0_ = 0.0;
  double dt_prev_ = 0.0;
  double dt_cur_ = 0.0;
  double last_boundary_ = 0.0;
  std::optional<double> window_start_;
  int epoch_ = 0;
  std::vector<Execution> executions_;
  std::unordered_map<TaskId, std::size_t> owner_;
  std::optional<std::size_t> first_;
  double first_deadline_ = std::numeric_limits<double>::infinity();
  std::optional<Reference> reference_;
  CutoffStats cutoff_;
  std::vector<WindowRecord> history_;
};

}  // namespace

std::unique_ptr<Scheduler> make_npdw_scheduler(const SchedulerConfig& cfg) {
  return std::make_unique<NpdwScheduler>(cfg);
}

}  // namespace npdw
