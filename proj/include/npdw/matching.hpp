#pragma once

// Preference generation and task-proposing stable matching.

#include <map>
#include <span>
#include <vector>

#include "npdw/task_model.hpp"

namespace npdw {

struct AffinityConfig {
  double beta = 0.5;

  void validate() const;
};

/// w_p = (p1/3 + p2/3) / 2, in [1/3, 1].
double task_weight(const TaskProfile& task);

/// w_c relative to the maxima over `cores`. A zero maximum load makes the
/// load term 1 for every core.
double core_weight(const CoreState& core, std::span<const CoreState> cores);

/// Matching affinity m of `task` as seen by `core`.
double matching_affinity(const TaskProfile& task, const CoreState& core, std::span<const TaskProfile> tasks,
                         std::span<const CoreState> cores, const AffinityConfig& cfg = {});

struct PreferenceLists {
  std::vector<TaskId> tasks;
  std::vector<CoreId> cores;
  std::map<TaskId, std::vector<CoreId>> task_prefs;
  std::map<CoreId, std::vector<TaskId>> core_prefs;
};

/// Cores ordered by descending w_c for every task, tasks by descending m for
/// every core, ties by ascending id. Force-scheduled tasks lead every core list.
PreferenceLists build_preferences(std::span<const TaskProfile> tasks, std::span<const CoreState> cores,
                                  const AffinityConfig& cfg = {});

struct Edge {
  TaskId task;
  CoreId core;

  friend auto operator<=>(const Edge&, const Edge&) = default;
};

struct Matching {
  std::vector<Edge> edges;  // sorted by task id
  double time = 0.0;

  std::optional<CoreId> core_of(TaskId task) const;
  std::optional<TaskId> task_of(CoreId core) const;
};

struct Proposal {
  TaskId task;
  CoreId core;
  bool accepted = false;
  std::optional<TaskId> displaced;
};

struct MatchResult {
  Matching matching;
  std::vector<Proposal> proposals;
};

/// Task-proposing deferred acceptance. Throws std::invalid_argument when a
/// list is not a permutation of the other side.
MatchResult gale_shapley(const PreferenceLists& prefs, double time = 0.0);

/// True when no task and core would both rather have each other.
bool is_stable(const PreferenceLists& prefs, const Matching& matching);

}  // namespace npdw
