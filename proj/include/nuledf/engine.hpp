#pragma once

#include <algorithm>
#include <functional>
#include <numbers>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "nuledf/metrics.hpp"
#include "nuledf/model.hpp"
#include "nuledf/policies.hpp"

namespace nuledf {

enum class EventKind {
  Release,
  AdmitHolding,
  AdmitExecution,
  StartQuantum,
  EndQuantum,
  Complete,
  Miss,
  Migrate,
};

enum class MissReason {
  DeadlinePassed,     // laxity went negative outside the holding queue, or while holding below the bound
  BoundExceeded,      // discarded while holding with u2 above the schedulability bound, or rejected on <= 2 cores
  AdmissionRejected,  // baseline EDF found no core with capacity at release
  HorizonExceeded,    // simulation horizon ended first
};

enum class AdmitSource {
  Admission,           // baseline EDF admission at release
  Classification,      // placed straight into the execution queue at release
  IdlePull,            // moved from holding because its core had nothing to run
  ZeroLaxityUrgent,    // laxity reached zero, dispatched urgently to the same core
  ZeroLaxityNextCore,  // laxity reached zero with u2 >= 2, dispatched to the next core
};

struct Event {
  Tick time = 0;
  EventKind kind = EventKind::Release;
  int task_id = 0;
  std::optional<int> core;
  std::optional<double> nlax_at_event;
  std::optional<MissReason> miss_reason;
  std::optional<AdmitSource> admit_source;
};

struct SimResult {
  PolicyId policy = PolicyId::Edf;
  int cores = 0;
  std::vector<Event> trace;
  int scheduled_count = 0;
  int missed_count = 0;
  std::vector<double> per_core_util;  // scaled utilisation sums, one entry per core
  double avg_util = 0.0;              // mean per-core average over cores that received tasks
  double u1_used = 1.0;               // scale applied to per-core utilisation
  std::vector<TaskState> final_states;  // in task-set order
};

/// Aggregated utilisation view of one run.
struct Summary {
  std::vector<double> per_core_util;
  std::vector<double> per_core_avg;
  std::vector<int> tasks_per_core;
  double avg_util = 0.0;
};

/// Mean of the per-core averages, skipping cores that never completed a task.
inline double mean_over_active_cores(const std::vector<double>& per_core_avg,
                                     const std::vector<int>& tasks_per_core) {
  double sum = 0.0;
  int active = 0;
  for (std::size_t i = 0; i < per_core_avg.size(); ++i) {
    if (tasks_per_core[i] > 0) {
      sum += per_core_avg[i];
      ++active;
    }
  }
  return active > 0 ? sum / active : 0.0;
}

/// Per-core utilisation sums over completed tasks, scaled by u1 (1.0 for the
/// baseline policy), with per-core averages and their mean.
inline Summary summarize(const SimResult& result, const TaskSet& ts, double u1) {
  Summary s;
  s.per_core_util.assign(static_cast<std::size_t>(result.cores), 0.0);
  s.per_core_avg.assign(static_cast<std::size_t>(result.cores), 0.0);
  s.tasks_per_core.assign(static_cast<std::size_t>(result.cores), 0);
  for (const Event& e : result.trace) {
    if (e.kind != EventKind::Complete || !e.core) continue;
    const Task* t = ts.find(e.task_id);
    if (t == nullptr) continue;
    const std::size_t c = static_cast<std::size_t>(*e.core - 1);
    s.per_core_util[c] += utilisation(t->exec, t->window());
    s.tasks_per_core[c] += 1;
  }
  for (std::size_t c = 0; c < s.per_core_util.size(); ++c) {
    s.per_core_util[c] *= u1;
    if (s.tasks_per_core[c] > 0) s.per_core_avg[c] = s.per_core_util[c] / s.tasks_per_core[c];
  }
  s.avg_util = mean_over_active_cores(s.per_core_avg, s.tasks_per_core);
  return s;
}

/// Queue contents at the end of one tick, for cross-checking against an
/// independent reference implementation.
struct QueueSnapshot {
  Tick now = 0;
  std::vector<int> holding;                 // task ids, ascending
  std::vector<std::vector<int>> execution;  // per core, task ids ascending (running included)
  std::vector<int> running;                 // per core, running task id or 0
};

using TickObserver = std::function<void(const QueueSnapshot&)>;

namespace detail {

struct RunTask {
  const Task* t = nullptr;
  double u = 0.0;   // exec over arrival-to-deadline window
  double wt = 0.0;  // static weight
  TaskState st;
  bool released = false;
  bool classified = false;
  int home = 0;  // 1-based core, 0 = none
};

struct CoreSlot {
  int grant_task = 0;  // 0 = idle
  Tick grant_end = 0;
  std::vector<int> assigned;  // live task ids homed here, ascending
};

inline void insert_sorted(std::vector<int>& v, int id) {
  v.insert(std::lower_bound(v.begin(), v.end(), id), id);
}

inline void erase_value(std::vector<int>& v, int id) {
  v.erase(std::remove(v.begin(), v.end(), id), v.end());
}

}  // namespace detail

/// Runs one policy over a task set. Deterministic: identical inputs produce
/// identical traces. Each tick proceeds through a fixed phase order: quantum
/// boundaries, releases, placement, holding-queue review, a miss sweep on
/// negative laxity, work-conserving pulls from the holding queue, dispatch,
/// then one tick of execution on every granted core.
inline SimResult run(PolicyId policy, const TaskSet& ts, const Platform& pf,
                     const SimConfig& cfg, const TickObserver& observer = {}) {
  {
    const auto violations = validate(ts, pf);
    if (!violations.empty()) {
      std::string msg = "run: invalid inputs:";
      for (const Violation& v : violations) msg += " [" + v.message + "]";
      throw std::invalid_argument(msg);
    }
  }

  const int m = pf.cores;
  const bool nul = policy == PolicyId::NulEdf;
  const double eps = cfg.epsilon;
  const double bound_l =
      schedulability_bound(m, cfg.exact_euler ? std::numbers::e : kEuler3);
  const Tick horizon = cfg.max_time > 0 ? cfg.max_time : ts.max_deadline() + 1;

  SimResult res;
  res.policy = policy;
  res.cores = m;

  const std::size_t n = ts.size();
  std::vector<detail::RunTask> tasks(n);
  for (std::size_t i = 0; i < n; ++i) {
    detail::RunTask& rt = tasks[i];
    rt.t = &ts.tasks[i];
    rt.u = utilisation(rt.t->exec, rt.t->window());
    rt.wt = weight(rt.t->quant, rt.t->exec, rt.t->ctot);
    rt.st.task_id = rt.t->id;
    rt.st.remaining = rt.t->exec;
  }

  // Index orders used throughout: release order by (arrival, id), and plain
  // ascending id for every per-tick scan.
  std::vector<std::size_t> by_release(n), by_id(n);
  for (std::size_t i = 0; i < n; ++i) by_release[i] = by_id[i] = i;
  std::sort(by_release.begin(), by_release.end(), [&](std::size_t a, std::size_t b) {
    if (tasks[a].t->arrival != tasks[b].t->arrival) return tasks[a].t->arrival < tasks[b].t->arrival;
    return tasks[a].t->id < tasks[b].t->id;
  });
  std::sort(by_id.begin(), by_id.end(),
            [&](std::size_t a, std::size_t b) { return tasks[a].t->id < tasks[b].t->id; });

  auto task_index = [&](int id) -> std::size_t {
    auto it = std::lower_bound(by_id.begin(), by_id.end(), id, [&](std::size_t i, int key) {
      return tasks[i].t->id < key;
    });
    return *it;
  };

  std::vector<detail::CoreSlot> cores(static_cast<std::size_t>(m) + 1);
  std::vector<int> holding;  // task ids, kept ascending

  double u1 = cfg.frozen_u1.value_or(modification_factor(0.0));
  std::vector<int> u1_population;
  int unresolved = static_cast<int>(n);  // tasks not yet Completed/Missed
  std::size_t next_release = 0;

  auto emit = [&](Event e) { res.trace.push_back(std::move(e)); };

  auto nlax_of = [&](const detail::RunTask& rt, Tick now) {
    return laxity(rt.t->dline, now, rt.st.remaining) * rt.wt;
  };

  // Core load is always a fresh ascending-id summation over the members, so
  // the value never depends on the history of additions and removals.
  auto core_load = [&](int c) {
    double load = 0.0;
    for (int id : cores[static_cast<std::size_t>(c)].assigned) load += tasks[task_index(id)].u;
    return load;
  };

  auto least_loaded_core = [&]() {
    int best = 1;
    double best_load = core_load(1);
    for (int c = 2; c <= m; ++c) {
      const double load = core_load(c);
      if (load < best_load) {
        best = c;
        best_load = load;
      }
    }
    return best;
  };

  auto assign_home = [&](detail::RunTask& rt, int core) {
    rt.home = core;
    detail::insert_sorted(cores[static_cast<std::size_t>(core)].assigned, rt.t->id);
  };

  auto home_core_for = [&](const detail::RunTask& rt) {
    auto it = pf.pinned.find(rt.t->id);
    return it != pf.pinned.end() ? it->second : least_loaded_core();
  };

  // Terminal transitions. A missed task closes its in-flight grant so the
  // trace keeps non-overlapping quantum intervals.
  auto miss_task = [&](detail::RunTask& rt, Tick now, MissReason reason, double nlax) {
    if (rt.home != 0) {
      detail::CoreSlot& cs = cores[static_cast<std::size_t>(rt.home)];
      if (cs.grant_task == rt.t->id) {
        emit({now, EventKind::EndQuantum, rt.t->id, rt.home, std::nullopt, std::nullopt,
              std::nullopt});
        cs.grant_task = 0;
      }
      detail::erase_value(cs.assigned, rt.t->id);
    }
    detail::erase_value(holding, rt.t->id);
    rt.st.queue = QueueKind::None;
    rt.st.status = TaskStatus::Missed;
    emit({now, EventKind::Miss, rt.t->id, rt.st.core, nlax, reason, std::nullopt});
    rt.st.core.reset();
    --unresolved;
  };

  auto complete_task = [&](detail::RunTask& rt, Tick now) {
    detail::erase_value(cores[static_cast<std::size_t>(rt.home)].assigned, rt.t->id);
    rt.st.queue = QueueKind::None;
    rt.st.status = TaskStatus::Completed;
    emit({now, EventKind::Complete, rt.t->id, *rt.st.core, std::nullopt, std::nullopt,
          std::nullopt});
    --unresolved;
  };

  auto enter_execution = [&](detail::RunTask& rt, Tick now, int core, AdmitSource source,
                             double nlax) {
    rt.st.queue = QueueKind::Execution;
    rt.st.core = core;
    emit({now, EventKind::AdmitExecution, rt.t->id, core, nlax, std::nullopt, source});
  };

  // The modification factor tracks the live released population: it is
  // recomputed from the current laxity-normalised utilisations whenever that
  // population changes, and held between changes.
  auto refresh_u1 = [&](Tick now) {
    if (cfg.frozen_u1) return;
    std::vector<int> population;
    for (std::size_t i : by_id) {
      const detail::RunTask& rt = tasks[i];
      if (rt.released && rt.st.status != TaskStatus::Completed &&
          rt.st.status != TaskStatus::Missed) {
        population.push_back(rt.t->id);
      }
    }
    if (population == u1_population) return;
    u1_population = std::move(population);
    if (u1_population.empty()) return;
    double u_max = 0.0;  // negative normalised laxities never raise the factor
    for (int id : u1_population) {
      const detail::RunTask& rt = tasks[task_index(id)];
      u_max = std::max(u_max,
                       laxity_normalized_utilisation(nlax_of(rt, now), rt.t->dline));
    }
    u1 = modification_factor(u_max);
  };

  Tick now = 0;
  for (; now <= horizon && unresolved > 0; ++now) {
    // 1. Quantum boundaries reached at this tick.
    for (int c = 1; c <= m; ++c) {
      detail::CoreSlot& cs = cores[static_cast<std::size_t>(c)];
      if (cs.grant_task != 0 && cs.grant_end == now) {
        detail::RunTask& rt = tasks[task_index(cs.grant_task)];
        emit({now, EventKind::EndQuantum, rt.t->id, c, std::nullopt, std::nullopt, std::nullopt});
        cs.grant_task = 0;
        if (rt.st.remaining == 0) complete_task(rt, now);
      }
    }

    // 2. Releases.
    while (next_release < n && tasks[by_release[next_release]].t->arrival == now) {
      detail::RunTask& rt = tasks[by_release[next_release]];
      ++next_release;
      rt.released = true;
      emit({now, EventKind::Release, rt.t->id, std::nullopt, std::nullopt, std::nullopt,
            std::nullopt});
      if (!nul) {
        // Baseline: admit at release to the first core with capacity, or count
        // the task missed. A pinned assignment overrides the admission test.
        auto pin = pf.pinned.find(rt.t->id);
        int target = 0;
        if (pin != pf.pinned.end()) {
          target = pin->second;
        } else {
          for (int c = 1; c <= m; ++c) {
            if (edf_admit(rt.u, core_load(c))) {
              target = c;
              break;
            }
          }
        }
        if (target == 0) {
          miss_task(rt, now, MissReason::AdmissionRejected, nlax_of(rt, now));
        } else {
          assign_home(rt, target);
          enter_execution(rt, now, target, AdmitSource::Admission, nlax_of(rt, now));
        }
      }
    }

    if (nul) {
      // 3. Classify newly released tasks under the current modification factor.
      refresh_u1(now);
      for (std::size_t i : by_id) {
        detail::RunTask& rt = tasks[i];
        if (!rt.released || rt.classified || rt.st.status == TaskStatus::Missed) continue;
        rt.classified = true;
        const double u2 = modified_utilisation(u1, rt.u);
        const double nlax = nlax_of(rt, now);
        switch (classify(u2, m)) {
          case Placement::HoldingQueue:
            assign_home(rt, home_core_for(rt));
            rt.st.queue = QueueKind::Holding;
            rt.st.core = rt.home;
            detail::insert_sorted(holding, rt.t->id);
            emit({now, EventKind::AdmitHolding, rt.t->id, rt.home, nlax, std::nullopt,
                  std::nullopt});
            break;
          case Placement::ExecutionQueue:
            assign_home(rt, home_core_for(rt));
            enter_execution(rt, now, rt.home, AdmitSource::Classification, nlax);
            break;
          case Placement::RejectTwoCore:
            miss_task(rt, now, MissReason::BoundExceeded, nlax);
            break;
        }
      }

      // 4. Review the holding queue with the live clock.
      const std::vector<int> holding_now = holding;
      for (int id : holding_now) {
        detail::RunTask& rt = tasks[task_index(id)];
        if (rt.st.queue != QueueKind::Holding) continue;
        const double nlax = nlax_of(rt, now);
        const double u2 = modified_utilisation(u1, rt.u);
        switch (evaluate_holding(nlax, u2, bound_l, eps)) {
          case HoldingAction::Hold:
            break;
          case HoldingAction::DispatchUrgentSameCore:
          case HoldingAction::DispatchSameCore:
            detail::erase_value(holding, id);
            enter_execution(rt, now, rt.home, AdmitSource::ZeroLaxityUrgent, nlax);
            break;
          case HoldingAction::DispatchNextCore: {
            detail::erase_value(holding, id);
            const int target = next_core(rt.home, m);
            detail::erase_value(cores[static_cast<std::size_t>(rt.home)].assigned, id);
            assign_home(rt, target);
            emit({now, EventKind::Migrate, id, target, nlax, std::nullopt, std::nullopt});
            enter_execution(rt, now, target, AdmitSource::ZeroLaxityNextCore, nlax);
            break;
          }
          case HoldingAction::DiscardMissed:
            miss_task(rt, now, u2 > bound_l ? MissReason::BoundExceeded : MissReason::DeadlinePassed,
                      nlax);
            break;
        }
      }
    }

    // 5. Miss sweep: any live task whose deadline has become unreachable.
    for (std::size_t i : by_id) {
      detail::RunTask& rt = tasks[i];
      if (!rt.released || rt.st.status == TaskStatus::Completed ||
          rt.st.status == TaskStatus::Missed) {
        continue;
      }
      if (rt.t->dline - (now + rt.st.remaining) < 0) {
        miss_task(rt, now, MissReason::DeadlinePassed, nlax_of(rt, now));
      }
    }

    // 6. Work conservation: a core with nothing runnable pulls its
    // earliest-deadline holding task instead of idling.
    if (nul && !holding.empty()) {
      for (int c = 1; c <= m; ++c) {
        detail::CoreSlot& cs = cores[static_cast<std::size_t>(c)];
        if (cs.grant_task != 0) continue;
        int pick = 0;
        bool has_runnable = false;
        for (int id : cs.assigned) {
          const detail::RunTask& rt = tasks[task_index(id)];
          if (rt.st.queue == QueueKind::Execution) {
            has_runnable = true;
            break;
          }
        }
        if (has_runnable) continue;
        for (int id : cs.assigned) {
          const detail::RunTask& rt = tasks[task_index(id)];
          if (rt.st.queue != QueueKind::Holding) continue;
          if (pick == 0 || edf_before(*rt.t, *tasks[task_index(pick)].t)) pick = id;
        }
        if (pick != 0) {
          detail::RunTask& rt = tasks[task_index(pick)];
          detail::erase_value(holding, pick);
          enter_execution(rt, now, c, AdmitSource::IdlePull, nlax_of(rt, now));
        }
      }
    }

    // 7. Dispatch: idle cores grant one quantum to the earliest-deadline task
    // in their execution partition.
    for (int c = 1; c <= m; ++c) {
      detail::CoreSlot& cs = cores[static_cast<std::size_t>(c)];
      if (cs.grant_task != 0) continue;
      int pick = 0;
      for (int id : cs.assigned) {
        const detail::RunTask& rt = tasks[task_index(id)];
        if (rt.st.queue != QueueKind::Execution) continue;
        if (pick == 0 || edf_before(*rt.t, *tasks[task_index(pick)].t)) pick = id;
      }
      if (pick == 0) continue;
      detail::RunTask& rt = tasks[task_index(pick)];
      cs.grant_task = pick;
      cs.grant_end = now + std::min(rt.t->quant, rt.st.remaining);
      rt.st.status = TaskStatus::Running;
      rt.st.start_times.push_back(now);
      emit({now, EventKind::StartQuantum, pick, c, std::nullopt, std::nullopt, std::nullopt});
    }

    // 8. One tick of execution on every granted core.
    for (int c = 1; c <= m; ++c) {
      detail::CoreSlot& cs = cores[static_cast<std::size_t>(c)];
      if (cs.grant_task != 0) tasks[task_index(cs.grant_task)].st.remaining -= 1;
    }

    if (observer) {
      QueueSnapshot snap;
      snap.now = now;
      snap.holding = holding;
      snap.execution.resize(static_cast<std::size_t>(m));
      snap.running.resize(static_cast<std::size_t>(m));
      for (int c = 1; c <= m; ++c) {
        const detail::CoreSlot& cs = cores[static_cast<std::size_t>(c)];
        for (int id : cs.assigned) {
          if (tasks[task_index(id)].st.queue == QueueKind::Execution) {
            snap.execution[static_cast<std::size_t>(c - 1)].push_back(id);
          }
        }
        snap.running[static_cast<std::size_t>(c - 1)] = cs.grant_task;
      }
      observer(snap);
    }
  }

  // Horizon exhausted: close in-flight grants (completing work that finished
  // exactly at the boundary) and record the rest as horizon misses.
  if (unresolved > 0) {
    for (int c = 1; c <= m; ++c) {
      detail::CoreSlot& cs = cores[static_cast<std::size_t>(c)];
      if (cs.grant_task == 0) continue;
      detail::RunTask& rt = tasks[task_index(cs.grant_task)];
      emit({now, EventKind::EndQuantum, rt.t->id, c, std::nullopt, std::nullopt, std::nullopt});
      cs.grant_task = 0;
      if (rt.st.remaining == 0) complete_task(rt, now);
    }
    for (std::size_t i : by_id) {
      detail::RunTask& rt = tasks[i];
      if (rt.st.status == TaskStatus::Completed || rt.st.status == TaskStatus::Missed) continue;
      miss_task(rt, now, MissReason::HorizonExceeded, nlax_of(rt, now));
    }
  }

  for (std::size_t i = 0; i < n; ++i) {
    if (tasks[i].st.status == TaskStatus::Completed) ++res.scheduled_count;
    if (tasks[i].st.status == TaskStatus::Missed) ++res.missed_count;
    res.final_states.push_back(tasks[i].st);
  }
  res.u1_used = nul ? u1 : 1.0;
  const Summary s = summarize(res, ts, res.u1_used);
  res.per_core_util = s.per_core_util;
  res.avg_util = s.avg_util;
  return res;
}

}  // namespace nuledf
