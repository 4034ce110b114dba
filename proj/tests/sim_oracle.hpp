#pragma once

// Brute-force reference simulator used to cross-check the engine. It keeps
// only flat per-task state and re-derives everything else every tick by
// scanning: core loads are recomputed by summation, the modification factor
// by a fresh maximum over the live set, and queue decisions by re-applying
// the policy functions to every live task. No incremental bookkeeping, no
// per-core queues, no cached metrics.

#include <algorithm>
#include <numbers>
#include <vector>

#include "nuledf/engine.hpp"
#include "nuledf/metrics.hpp"
#include "nuledf/model.hpp"
#include "nuledf/policies.hpp"
#include "nuledf/workload.hpp"

namespace oracle {

using namespace nuledf;

struct OracleResult {
  std::vector<QueueSnapshot> ticks;
  std::vector<TaskStatus> final_status;  // task-set order
};

namespace detail {

struct OTask {
  Task t;
  Tick remaining = 0;
  bool released = false;
  bool classified = false;
  int queue = 0;  // 0 none, 1 holding, 2 execution
  int home = 0;   // 1-based, 0 unassigned
  TaskStatus status = TaskStatus::Pending;
};

inline bool terminal(const OTask& o) {
  return o.status == TaskStatus::Completed || o.status == TaskStatus::Missed;
}

inline double util_of(const Task& t) {
  return static_cast<double>(t.exec) / static_cast<double>(t.dline - t.arrival);
}

inline double nlax_of(const OTask& o, Tick now) {
  const double w = static_cast<double>(o.t.quant) / static_cast<double>(o.t.exec) *
                   static_cast<double>(o.t.ctot);
  return static_cast<double>(o.t.dline - (now + o.remaining)) * w;
}

}  // namespace detail

inline OracleResult oracle_run(PolicyId policy, const TaskSet& ts, const Platform& pf,
                               const SimConfig& cfg) {
  using detail::OTask;
  const int m = pf.cores;
  const bool nul = policy == PolicyId::NulEdf;
  const double bound_l =
      schedulability_bound(m, cfg.exact_euler ? std::numbers::e : kEuler3);
  const Tick horizon = cfg.max_time > 0 ? cfg.max_time : ts.max_deadline() + 1;

  std::vector<OTask> tasks;
  for (const Task& t : ts.tasks) {
    OTask o;
    o.t = t;
    o.remaining = t.exec;
    tasks.push_back(o);
  }
  // scan order: ascending id
  std::vector<std::size_t> order(tasks.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return tasks[a].t.id < tasks[b].t.id; });

  std::vector<int> running(static_cast<std::size_t>(m) + 1, 0);
  std::vector<Tick> grant_end(static_cast<std::size_t>(m) + 1, 0);

  double u1 = cfg.frozen_u1.value_or(modification_factor(0.0));
  std::vector<int> u1_population;

  auto find = [&](int id) -> OTask& {
    for (OTask& o : tasks) {
      if (o.t.id == id) return o;
    }
    throw std::logic_error("oracle: unknown id");
  };

  auto load_of_core = [&](int c) {
    double load = 0.0;
    for (std::size_t i : order) {  // ascending id, the canonical summation order
      const OTask& o = tasks[i];
      if (!detail::terminal(o) && o.queue != 0 && o.home == c) load += detail::util_of(o.t);
    }
    return load;
  };

  auto place_core = [&](const OTask& o) {
    auto pin = pf.pinned.find(o.t.id);
    if (pin != pf.pinned.end()) return pin->second;
    int best = 1;
    for (int c = 2; c <= m; ++c) {
      if (load_of_core(c) < load_of_core(best)) best = c;
    }
    return best;
  };

  auto unresolved = [&]() {
    int k = 0;
    for (const OTask& o : tasks) {
      if (!detail::terminal(o)) ++k;
    }
    return k;
  };

  auto refresh_u1 = [&](Tick now) {
    if (cfg.frozen_u1) return;
    std::vector<int> population;
    for (std::size_t i : order) {
      const OTask& o = tasks[i];
      if (o.released && !detail::terminal(o)) population.push_back(o.t.id);
    }
    if (population == u1_population) return;
    u1_population = population;
    if (population.empty()) return;
    double u_max = 0.0;
    for (int id : population) {
      const OTask& o = find(id);
      u_max = std::max(u_max, detail::nlax_of(o, now) / static_cast<double>(o.t.dline));
    }
    u1 = modification_factor(u_max);
  };

  auto kill = [&](OTask& o) {
    if (o.home != 0 && running[static_cast<std::size_t>(o.home)] == o.t.id) {
      running[static_cast<std::size_t>(o.home)] = 0;
    }
    o.queue = 0;
    o.status = TaskStatus::Missed;
  };

  OracleResult res;
  for (Tick now = 0; now <= horizon && unresolved() > 0; ++now) {
    // quantum boundaries
    for (int c = 1; c <= m; ++c) {
      if (running[static_cast<std::size_t>(c)] != 0 && grant_end[static_cast<std::size_t>(c)] == now) {
        OTask& o = find(running[static_cast<std::size_t>(c)]);
        running[static_cast<std::size_t>(c)] = 0;
        if (o.remaining == 0) {
          o.queue = 0;
          o.status = TaskStatus::Completed;
        }
      }
    }
    // releases
    for (std::size_t i : order) {
      OTask& o = tasks[i];
      if (!o.released && o.t.arrival == now) {
        o.released = true;
        if (!nul) {
          auto pin = pf.pinned.find(o.t.id);
          int target = 0;
          if (pin != pf.pinned.end()) {
            target = pin->second;
          } else {
            for (int c = 1; c <= m && target == 0; ++c) {
              if (edf_admit(detail::util_of(o.t), load_of_core(c))) target = c;
            }
          }
          if (target == 0) {
            kill(o);
          } else {
            o.home = target;
            o.queue = 2;
          }
        }
      }
    }
    if (nul) {
      refresh_u1(now);
      // classification
      for (std::size_t i : order) {
        OTask& o = tasks[i];
        if (!o.released || o.classified || detail::terminal(o)) continue;
        o.classified = true;
        const double u2 = u1 * detail::util_of(o.t);
        switch (classify(u2, m)) {
          case Placement::HoldingQueue:
            o.home = place_core(o);
            o.queue = 1;
            break;
          case Placement::ExecutionQueue:
            o.home = place_core(o);
            o.queue = 2;
            break;
          case Placement::RejectTwoCore:
            kill(o);
            break;
        }
      }
      // holding review
      for (std::size_t i : order) {
        OTask& o = tasks[i];
        if (detail::terminal(o) || o.queue != 1) continue;
        const double u2 = u1 * detail::util_of(o.t);
        switch (evaluate_holding(detail::nlax_of(o, now), u2, bound_l, cfg.epsilon)) {
          case HoldingAction::Hold:
            break;
          case HoldingAction::DispatchUrgentSameCore:
          case HoldingAction::DispatchSameCore:
            o.queue = 2;
            break;
          case HoldingAction::DispatchNextCore:
            o.home = next_core(o.home, m);
            o.queue = 2;
            break;
          case HoldingAction::DiscardMissed:
            kill(o);
            break;
        }
      }
    }
    // miss sweep
    for (std::size_t i : order) {
      OTask& o = tasks[i];
      if (!o.released || detail::terminal(o)) continue;
      if (o.t.dline - (now + o.remaining) < 0) kill(o);
    }
    // idle pull
    if (nul) {
      for (int c = 1; c <= m; ++c) {
        if (running[static_cast<std::size_t>(c)] != 0) continue;
        bool has_exec = false;
        for (const OTask& o : tasks) {
          if (!detail::terminal(o) && o.queue == 2 && o.home == c) has_exec = true;
        }
        if (has_exec) continue;
        int pick = 0;
        for (std::size_t i : order) {
          OTask& o = tasks[i];
          if (detail::terminal(o) || o.queue != 1 || o.home != c) continue;
          if (pick == 0 || edf_before(o.t, find(pick).t)) pick = o.t.id;
        }
        if (pick != 0) find(pick).queue = 2;
      }
    }
    // dispatch
    for (int c = 1; c <= m; ++c) {
      if (running[static_cast<std::size_t>(c)] != 0) continue;
      int pick = 0;
      for (std::size_t i : order) {
        OTask& o = tasks[i];
        if (detail::terminal(o) || o.queue != 2 || o.home != c) continue;
        if (pick == 0 || edf_before(o.t, find(pick).t)) pick = o.t.id;
      }
      if (pick != 0) {
        OTask& o = find(pick);
        running[static_cast<std::size_t>(c)] = pick;
        grant_end[static_cast<std::size_t>(c)] = now + std::min(o.t.quant, o.remaining);
        o.status = TaskStatus::Running;
      }
    }
    // execute
    for (int c = 1; c <= m; ++c) {
      if (running[static_cast<std::size_t>(c)] != 0) find(running[static_cast<std::size_t>(c)]).remaining -= 1;
    }

    QueueSnapshot snap;
    snap.now = now;
    for (std::size_t i : order) {
      const OTask& o = tasks[i];
      if (!detail::terminal(o) && o.queue == 1) snap.holding.push_back(o.t.id);
    }
    snap.execution.resize(static_cast<std::size_t>(m));
    snap.running.resize(static_cast<std::size_t>(m));
    for (int c = 1; c <= m; ++c) {
      for (std::size_t i : order) {
        const OTask& o = tasks[i];
        if (!detail::terminal(o) && o.queue == 2 && o.home == c) {
          snap.execution[static_cast<std::size_t>(c - 1)].push_back(o.t.id);
        }
      }
      snap.running[static_cast<std::size_t>(c - 1)] = running[static_cast<std::size_t>(c)];
    }
    res.ticks.push_back(std::move(snap));
  }

  // horizon sweep
  for (int c = 1; c <= m; ++c) {
    if (running[static_cast<std::size_t>(c)] != 0) {
      OTask& o = find(running[static_cast<std::size_t>(c)]);
      running[static_cast<std::size_t>(c)] = 0;
      if (o.remaining == 0) {
        o.queue = 0;
        o.status = TaskStatus::Completed;
      }
    }
  }
  for (OTask& o : tasks) {
    if (!detail::terminal(o)) kill(o);
  }
  for (const OTask& o : tasks) res.final_status.push_back(o.status);
  return res;
}

/// Small random instances (n <= 6, m <= 4, parameters <= 500) for
/// equivalence sweeps.
struct SmallInstance {
  TaskSet ts;
  Platform pf;
};

inline SmallInstance random_small_instance(Rng64& rng) {
  SmallInstance inst;
  inst.pf.cores = static_cast<int>(rng.next_int(1, 4));
  const int n = static_cast<int>(rng.next_int(0, 6));
  for (int i = 0; i < n; ++i) {
    Task t;
    t.id = i + 1;
    t.arrival = rng.next_int(0, 120);
    t.exec = rng.next_int(1, 60);
    t.dline = t.arrival + t.exec + rng.next_int(-10, 200);  // some infeasible windows
    if (t.dline <= t.arrival) t.dline = t.arrival + 1;
    t.quant = rng.next_int(1, t.exec);
    t.ctot = rng.next_int(1, 7);
    t.cur = t.arrival;
    inst.ts.tasks.push_back(t);
  }
  // occasionally pin a task
  if (n > 0 && rng.next_int(0, 3) == 0) {
    inst.pf.pinned[1] = static_cast<int>(rng.next_int(1, inst.pf.cores));
  }
  return inst;
}

}  // namespace oracle
