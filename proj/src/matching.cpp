#include "npdw/matching.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <numeric>
#include <set>
#include <stdexcept>
#include <string>
#include <unordered_map>

namespace npdw {

namespace {

struct CorePool {
  double max_speed = 0.0;
  double max_load = 0.0;
  int max_temp = 1;

  explicit CorePool(std::span<const CoreState> cores) {
    if (cores.empty()) throw std::invalid_argument("core_weight: empty core set");
    for (const auto& c : cores) {
      max_speed = std::max(max_speed, c.speed_mhz);
      max_load = std::max(max_load, c.load);
      max_temp = std::max(max_temp, c.temp_category);
    }
    if (!(max_speed > 0.0)) throw std::invalid_argument("core_weight: max core speed must be > 0");
  }

  double weight(const CoreState& c) const {
    const double speed = c.speed_mhz / max_speed;
    const double load = max_load > 0.0 ? 1.0 - c.load / max_load : 1.0;
    const double temp = 1.0 - static_cast<double>(c.temp_category) / static_cast<double>(max_temp);
    return (speed + load + temp) / 3.0;
  }
};

struct TaskPool {
  bool any_deadline = false;
  double max_deadline = 0.0;
  double max_credit = 0.0;

  explicit TaskPool(std::span<const TaskProfile> tasks) {
    for (const auto& t : tasks) {
      max_credit = std::max(max_credit, t.credit);
      if (t.deadline) {
        max_deadline = any_deadline ? std::max(max_deadline, *t.deadline) : *t.deadline;
        any_deadline = true;
      }
    }
  }

  // A task without a deadline counts as p3 = max{p3}.
  double deadline_term(const TaskProfile& t) const {
    if (!any_deadline || !t.deadline || !(max_deadline > 0.0)) return 0.0;
    return std::clamp(1.0 - *t.deadline / max_deadline, 0.0, 1.0);
  }

  double credit_term(const TaskProfile& t) const { return max_credit > 0.0 ? t.credit / max_credit : 0.0; }
};

double affinity(double wp, double wc, const TaskProfile& t, const TaskPool& pool, double beta) {
  const double rel = std::abs(wp - wc) / std::max(wp, wc);
  const double core_centric = 1.0 - rel;
  const double task_centric = pool.deadline_term(t) + pool.credit_term(t);
  return beta * core_centric + (1.0 - beta) / 2.0 * task_centric;
}

template <typename Id>
std::string id_str(Id id) {
  return std::to_string(id.value());
}

template <typename Id>
void require_permutation(const std::vector<Id>& list, const std::set<Id>& universe, const std::string& owner) {
  if (list.size() != universe.size() || std::set<Id>(list.begin(), list.end()) != universe)
    throw std::invalid_argument("preference list of " + owner + " is not a permutation of the other side");
}

}  // namespace

void AffinityConfig::validate() const {
  if (!(beta >= 0.0 && beta <= 1.0)) throw std::invalid_argument("affinity.beta must lie in [0, 1]");
}

double task_weight(const TaskProfile& task) { return 0.5 * (task.p1 / 3.0 + task.p2 / 3.0); }

double core_weight(const CoreState& core, std::span<const CoreState> cores) { return CorePool(cores).weight(core); }

double matching_affinity(const TaskProfile& task, const CoreState& core, std::span<const TaskProfile> tasks,
                         std::span<const CoreState> cores, const AffinityConfig& cfg) {
  cfg.validate();
  return affinity(task_weight(task), core_weight(core, cores), task, TaskPool(tasks), cfg.beta);
}

PreferenceLists build_preferences(std::span<const TaskProfile> tasks, std::span<const CoreState> cores,
                                  const AffinityConfig& cfg) {
  cfg.validate();
  PreferenceLists out;
  if (tasks.empty() || cores.empty()) return out;

  const CorePool core_pool(cores);
  const TaskPool task_pool(tasks);

  std::vector<double> wc(cores.size());
  for (std::size_t j = 0; j < cores.size(); ++j) wc[j] = core_pool.weight(cores[j]);

  std::vector<std::size_t> core_order(cores.size());
  std::iota(core_order.begin(), core_order.end(), 0);
  std::sort(core_order.begin(), core_order.end(), [&](std::size_t a, std::size_t b) {
    if (wc[a] != wc[b]) return wc[a] > wc[b];
    return cores[a].id < cores[b].id;
  });
  std::vector<CoreId> shared_task_list;
  for (auto j : core_order) shared_task_list.push_back(cores[j].id);

  for (const auto& t : tasks) {
    out.tasks.push_back(t.id);
    out.task_prefs[t.id] = shared_task_list;
  }

  std::vector<double> wp(tasks.size());
  for (std::size_t i = 0; i < tasks.size(); ++i) wp[i] = task_weight(tasks[i]);

  for (std::size_t j = 0; j < cores.size(); ++j) {
    out.cores.push_back(cores[j].id);
    std::vector<double> m(tasks.size());
    for (std::size_t i = 0; i < tasks.size(); ++i) m[i] = affinity(wp[i], wc[j], tasks[i], task_pool, cfg.beta);
    std::vector<std::size_t> order(tasks.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
      if (m[a] != m[b]) return m[a] > m[b];
      return tasks[a].id < tasks[b].id;
    });
    std::stable_partition(order.begin(), order.end(), [&](std::size_t i) { return tasks[i].force_schedule; });
    auto& list = out.core_prefs[cores[j].id];
    for (auto i : order) list.push_back(tasks[i].id);
  }
  return out;
}

std::optional<CoreId> Matching::core_of(TaskId task) const {
  for (const auto& e : edges)
    if (e.task == task) return e.core;
  return std::nullopt;
}

std::optional<TaskId> Matching::task_of(CoreId core) const {
  for (const auto& e : edges)
    if (e.core == core) return e.task;
  return std::nullopt;
}

MatchResult gale_shapley(const PreferenceLists& prefs, double time) {
  MatchResult result;
  result.matching.time = time;
  if (prefs.tasks.empty() || prefs.cores.empty()) return result;

  const std::set<TaskId> task_set(prefs.tasks.begin(), prefs.tasks.end());
  const std::set<CoreId> core_set(prefs.cores.begin(), prefs.cores.end());
  if (task_set.size() != prefs.tasks.size() || core_set.size() != prefs.cores.size())
    throw std::invalid_argument("gale_shapley: duplicate ids");
  for (auto u : prefs.tasks) {
    auto it = prefs.task_prefs.find(u);
    if (it == prefs.task_prefs.end()) throw std::invalid_argument("gale_shapley: no list for task " + id_str(u));
    require_permutation(it->second, core_set, "task " + id_str(u));
  }
  std::unordered_map<CoreId, std::unordered_map<TaskId, std::size_t>> rank;
  for (auto v : prefs.cores) {
    auto it = prefs.core_prefs.find(v);
    if (it == prefs.core_prefs.end()) throw std::invalid_argument("gale_shapley: no list for core " + id_str(v));
    require_permutation(it->second, task_set, "core " + id_str(v));
    for (std::size_t r = 0; r < it->second.size(); ++r) rank[v][it->second[r]] = r;
  }

  std::unordered_map<TaskId, std::size_t> next;
  std::unordered_map<CoreId, TaskId> holder;
  std::deque<TaskId> free(prefs.tasks.begin(), prefs.tasks.end());

  while (!free.empty()) {
    const TaskId u = free.front();
    const auto& list = prefs.task_prefs.at(u);
    auto& idx = next[u];
    if (idx >= list.size()) {
      free.pop_front();  // rejected everywhere: stays in the waiting set
      continue;
    }
    const CoreId v = list[idx++];
    Proposal p{u, v, false, std::nullopt};
    auto h = holder.find(v);
    if (h == holder.end()) {
      holder.emplace(v, u);
      p.accepted = true;
      free.pop_front();
    } else if (rank[v][u] < rank[v][h->second]) {
      p.accepted = true;
      p.displaced = h->second;
      free.pop_front();
      free.push_back(h->second);
      h->second = u;
    }
    result.proposals.push_back(p);
  }

  for (const auto& [v, u] : holder) result.matching.edges.push_back({u, v});
  std::sort(result.matching.edges.begin(), result.matching.edges.end());
  return result;
}

bool is_stable(const PreferenceLists& prefs, const Matching& matching) {
  auto position = [](const auto& list, auto x) {
    return static_cast<std::size_t>(std::find(list.begin(), list.end(), x) - list.begin());
  };
  for (auto u : prefs.tasks) {
    const auto& lu = prefs.task_prefs.at(u);
    const auto mine = matching.core_of(u);
    const std::size_t my_rank = mine ? position(lu, *mine) : lu.size();
    for (std::size_t r = 0; r < my_rank; ++r) {
      const CoreId v = lu[r];
      const auto& lv = prefs.core_prefs.at(v);
      const auto partner = matching.task_of(v);
      const std::size_t partner_rank = partner ? position(lv, *partner) : lv.size();
      if (position(lv, u) < partner_rank) return false;
    }
  }
  return true;
}

}  // namespace npdw
