#include "npdw/sim.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace npdw::sim {

namespace {

constexpr double kWorkEpsilon = 1e-9;
constexpr double kTimeEpsilon = 1e-9;

}  // namespace

void SimConfig::validate() const {
  if (num_cores < 1) throw std::invalid_argument("sim.num_cores must be >= 1");
  if (!(c_msp > 0.0)) throw std::invalid_argument("sim.c_msp must be > 0");
  if (!(tick > 0.0)) throw std::invalid_argument("sim.tick must be > 0");
  if (!(ambient < throttle_threshold)) throw std::invalid_argument("sim.ambient must be below the throttle threshold");
  if (!(heating >= 0.0)) throw std::invalid_argument("sim.heating must be >= 0");
  if (!(cooling > 0.0) || cooling * tick >= 1.0)
    throw std::invalid_argument("sim.cooling must be > 0 and cooling * tick < 1");
  if (!(throttle_factor > 0.0 && throttle_factor <= 1.0))
    throw std::invalid_argument("sim.throttle_factor must lie in (0, 1]");
  if (!(temp_boundaries[0] < temp_boundaries[1]))
    throw std::invalid_argument("sim.temp_boundaries must be strictly increasing");
  if (!(load_window >= tick)) throw std::invalid_argument("sim.load_window must be >= tick");
  if (!(sample_interval >= tick)) throw std::invalid_argument("sim.sample_interval must be >= tick");
  if (!(wp_sample_interval >= tick)) throw std::invalid_argument("sim.wp_sample_interval must be >= tick");
  if (!(duration_sigma >= 0.0)) throw std::invalid_argument("sim.duration_sigma must be >= 0");
  if (!(duration_scale > 0.0)) throw std::invalid_argument("sim.duration_scale must be > 0");
  if (!(stall_limit > 0.0)) throw std::invalid_argument("sim.stall_limit must be > 0");
}

std::int64_t SimConfig::ticks_per(double seconds) const {
  return std::max<std::int64_t>(1, std::llround(seconds / tick));
}

int temp_category(double raw_temp, const std::array<double, 2>& boundaries) noexcept {
  if (raw_temp < boundaries[0]) return 1;
  if (raw_temp < boundaries[1]) return 2;
  return 3;
}

World::World(SimConfig cfg, std::vector<SimTask> tasks) : cfg_(cfg), pending_(std::move(tasks)) {
  cfg_.validate();
  if (!std::is_sorted(pending_.begin(), pending_.end(), [](const SimTask& a, const SimTask& b) {
        return a.profile.arrival_time < b.profile.arrival_time;
      }))
    throw std::invalid_argument("World: tasks must be ordered by arrival time");

  sample_every_ = cfg_.ticks_per(cfg_.sample_interval);
  fine_every_ = cfg_.ticks_per(cfg_.wp_sample_interval);
  load_ticks_ = cfg_.ticks_per(cfg_.load_window);

  records_.reserve(pending_.size());
  for (std::size_t i = 0; i < pending_.size(); ++i) {
    const auto& t = pending_[i];
    if (!(t.duration > 0.0) || !(t.power_intensity > 0.0))
      throw std::invalid_argument("World: task durations and power intensities must be > 0");
    if (!record_index_.emplace(t.profile.id.value(), i).second)
      throw std::invalid_argument("World: duplicate task id " + std::to_string(t.profile.id.value()));
    TaskRecord r;
    r.id = t.profile.id.value();
    r.program = t.program;
    r.p1 = t.profile.p1;
    r.p2 = t.profile.p2;
    r.deadline = t.profile.deadline;
    r.arrival = t.profile.arrival_time;
    r.duration = t.duration;
    records_.push_back(std::move(r));
  }

  cores_.resize(static_cast<std::size_t>(cfg_.num_cores));
  for (std::size_t j = 0; j < cores_.size(); ++j) {
    auto& c = cores_[j];
    c.id = CoreId{static_cast<std::uint32_t>(j + 1)};
    c.speed = cfg_.c_msp;
    c.temp = cfg_.ambient;
    c.busy_ring.assign(static_cast<std::size_t>(load_ticks_), 0);
  }
  sample(0.0);
}

std::size_t World::inject_arrivals() {
  const double t = now();
  std::size_t n = 0;
  while (next_arrival_ < pending_.size() && pending_[next_arrival_].profile.arrival_time <= t + kTimeEpsilon) {
    waiting_.push_back(pending_[next_arrival_].profile);
    ++next_arrival_;
    ++n;
  }
  return n;
}

const TaskProfile* World::find_waiting(TaskId id) const {
  auto it = std::find_if(waiting_.begin(), waiting_.end(), [&](const TaskProfile& t) { return t.id == id; });
  return it == waiting_.end() ? nullptr : &*it;
}

std::vector<CoreId> World::idle_cores() const {
  std::vector<CoreId> out;
  for (const auto& c : cores_)
    if (!c.task) out.push_back(c.id);
  return out;
}

bool World::is_idle(CoreId core) const {
  for (const auto& c : cores_)
    if (c.id == core) return !c.task;
  throw std::invalid_argument("unknown core " + std::to_string(core.value()));
}

double World::load_of(const Core& c) const {
  const std::int64_t span = std::min(tick_, load_ticks_);
  if (span == 0) return 0.0;
  return static_cast<double>(c.busy_count) / static_cast<double>(span);
}

std::vector<CoreState> World::snapshot_cores() const {
  std::vector<CoreState> out;
  out.reserve(cores_.size());
  for (const auto& c : cores_) {
    CoreState s;
    s.id = c.id;
    s.speed_mhz = c.speed;
    s.load = load_of(c);
    s.temp_category = temp_category(c.temp, cfg_.temp_boundaries);
    s.max_speed_mhz = cfg_.c_msp;
    s.raw_temp = c.temp;
    out.push_back(s);
  }
  return out;
}

std::vector<CoreState> World::snapshot_idle_cores() const {
  auto all = snapshot_cores();
  std::erase_if(all, [&](const CoreState& s) { return !is_idle(s.id); });
  return all;
}

void World::dispatch(const Matching& matching, std::size_t waiting_set_size) {
  if (matching.edges.empty()) return;
  for (const auto& e : matching.edges) {
    if (!is_idle(e.core))
      throw std::logic_error("dispatch: core " + std::to_string(e.core.value()) + " is busy");
    if (!find_waiting(e.task))
      throw std::logic_error("dispatch: task " + std::to_string(e.task.value()) + " is not waiting");
  }
  if (waiting_set_size < matching.edges.size())
    throw std::logic_error("dispatch: |U| smaller than the matching");

  const double t = now();
  for (const auto& e : matching.edges) {
    auto it = std::find_if(waiting_.begin(), waiting_.end(), [&](const TaskProfile& p) { return p.id == e.task; });
    const auto spent = spend_credit(*it, waiting_set_size);
    waiting_.erase(it);

    const auto slot = record_index_.at(e.task.value());
    auto& rec = records_[slot];
    rec.matched = t;
    rec.start = t;
    rec.charged = spent.charged;
    rec.core = e.core.value();

    auto& core = cores_[e.core.value() - 1];
    core.task = e.task;
    core.remaining = pending_[slot].duration;
    core.power = pending_[slot].power_intensity;
    core.started = t;
  }
}

std::vector<Completion> World::step() {
  const double dt = cfg_.tick;
  std::vector<Completion> done;
  const auto ring_slot = static_cast<std::size_t>(tick_ % load_ticks_);
  ++tick_;
  const double t = now();

  for (auto& c : cores_) {
    const bool busy = c.task.has_value();
    if (busy) c.remaining -= dt * (c.speed / cfg_.c_msp);

    c.busy_count += static_cast<std::int64_t>(busy) - c.busy_ring[ring_slot];
    c.busy_ring[ring_slot] = static_cast<std::uint8_t>(busy);

    const double heat = busy ? cfg_.heating * c.power : 0.0;
    c.temp += dt * (heat - cfg_.cooling * (c.temp - cfg_.ambient));
    c.temp = std::max(c.temp, cfg_.ambient);

    const bool hot = cfg_.throttle_enabled && c.temp >= cfg_.throttle_threshold;
    c.speed = hot ? cfg_.throttle_factor * cfg_.c_msp : cfg_.c_msp;

    if (busy && c.remaining <= kWorkEpsilon) {
      auto& rec = records_[record_index_.at(c.task->value())];
      rec.finish = t;
      done.push_back({*c.task, c.id, c.started, t});
      c.task.reset();
      c.remaining = 0.0;
      c.power = 0.0;
    }
  }

  if (tick_ % fine_every_ == 0 || tick_ % sample_every_ == 0) sample(t);
  return done;
}

void World::sample(double t) {
  const auto snap = snapshot_cores();
  if (tick_ % fine_every_ == 0) {
    fine_.push_back({t, utilization_throughput(snap), operating_throughput(snap)});
  }
  if (tick_ % sample_every_ == 0) {
    for (const auto& s : snap) samples_.push_back({t, s.id.value(), s.speed_mhz, s.load, s.raw_temp});
  }
}

bool World::finished() const noexcept { return all_arrived() && waiting_.empty() && running_count() == 0; }

std::size_t World::running_count() const noexcept {
  return static_cast<std::size_t>(std::count_if(cores_.begin(), cores_.end(), [](const Core& c) {
    return c.task.has_value();
  }));
}

std::optional<double> World::next_arrival_time() const {
  if (next_arrival_ >= pending_.size()) return std::nullopt;
  return pending_[next_arrival_].profile.arrival_time;
}

double World::last_arrival_time() const { return pending_.empty() ? 0.0 : pending_.back().profile.arrival_time; }

ThroughputSample World::throughput_between(double t0, double t1) const {
  ThroughputSample acc{t1, 0.0, 0.0};
  std::size_t n = 0;
  auto it = std::upper_bound(fine_.begin(), fine_.end(), t0 + kTimeEpsilon,
                             [](double t, const ThroughputSample& s) { return t < s.time; });
  for (; it != fine_.end() && it->time <= t1 + kTimeEpsilon; ++it) {
    acc.ut += it->ut;
    acc.ot += it->ot;
    ++n;
  }
  if (n == 0) {
    const auto snap = snapshot_cores();
    return {t1, utilization_throughput(snap), operating_throughput(snap)};
  }
  acc.ut /= static_cast<double>(n);
  acc.ot /= static_cast<double>(n);
  return acc;
}

SimTrace World::take_trace(std::string scheduler_name) {
  SimTrace trace;
  trace.scheduler = std::move(scheduler_name);
  trace.seed = cfg_.seed;
  trace.cores = samples_;
  trace.tasks = records_;
  trace.end_time = now();
  trace.completed = finished();
  return trace;
}

}  // namespace npdw::sim
