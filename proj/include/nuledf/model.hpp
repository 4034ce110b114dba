#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace nuledf {

/// Discrete simulation time. All task parameters are integer ticks; only
/// derived metrics (laxity products, utilisations) are real-valued.
using Tick = std::int64_t;

/// Static parameters of one aperiodic task.
struct Task {
  int id = 0;
  Tick arrival = 0;  // release time
  Tick exec = 0;     // allocated execution time
  Tick dline = 0;    // absolute deadline
  Tick quant = 0;    // quantum slice granted per dispatch
  Tick ctot = 0;     // core time reserved for one quantum
  Tick cur = 0;      // stored current-time snapshot; the simulator uses the live clock

  // Arrival-to-deadline window.
  Tick window() const { return dline - arrival; }
};

/// An ordered collection of tasks with unique ids. Iteration order is the
/// construction (file) order.
struct TaskSet {
  std::vector<Task> tasks;

  std::size_t size() const { return tasks.size(); }
  bool empty() const { return tasks.empty(); }

  const Task* find(int id) const {
    for (const Task& t : tasks) {
      if (t.id == id) return &t;
    }
    return nullptr;
  }

  Tick max_deadline() const {
    Tick d = 0;
    for (const Task& t : tasks) d = std::max(d, t.dline);
    return d;
  }
};

/// The machine model: a number of identical cores, plus an optional fixed
/// task-to-core assignment used to reproduce known schedules.
struct Platform {
  int cores = 1;
  std::map<int, int> pinned;  // task id -> core index in [1, cores]
};

enum class QueueKind { None, Holding, Execution };
enum class TaskStatus { Pending, Running, Completed, Missed };

/// Evolving per-task simulation state.
struct TaskState {
  int task_id = 0;
  Tick remaining = 0;
  QueueKind queue = QueueKind::None;
  std::optional<int> core;
  TaskStatus status = TaskStatus::Pending;
  std::vector<Tick> start_times;  // tick of each quantum grant
};

/// Simulation knobs. max_time == 0 derives the horizon from the task set
/// (max deadline + 1), which guarantees every task resolves naturally.
struct SimConfig {
  static constexpr Tick tick = 1;
  std::uint64_t seed = 0;
  Tick max_time = 0;
  double epsilon = 1e-9;            // zero-laxity tolerance on reals
  bool exact_euler = false;         // full-precision e in the schedulability bound
  std::optional<double> frozen_u1;  // reproduction aid: pin the modification factor
};

struct Violation {
  std::optional<int> task_id;
  std::string message;
};

/// Checks every structural invariant of a task set against a platform and
/// returns all violations found. Never mutates its inputs; an empty result
/// means the pair is valid.
inline std::vector<Violation> validate(const TaskSet& ts, const Platform& pf) {
  std::vector<Violation> out;
  auto add = [&out](std::optional<int> id, std::string msg) {
    out.push_back(Violation{id, std::move(msg)});
  };

  if (pf.cores < 1) add(std::nullopt, "platform must have at least one core");

  std::vector<int> seen;
  for (const Task& t : ts.tasks) {
    const std::string label = "task " + std::to_string(t.id);
    if (t.id <= 0) add(t.id, label + ": id must be a positive integer");
    if (t.arrival < 0) add(t.id, label + ": arrival must be >= 0");
    if (t.exec <= 0) add(t.id, label + ": exec must be > 0");
    if (t.quant <= 0) add(t.id, label + ": quant must be > 0");
    if (t.ctot <= 0) add(t.id, label + ": ctot must be > 0");
    if (t.cur < 0) add(t.id, label + ": cur must be >= 0");
    if (t.quant > t.exec) add(t.id, label + ": quant must not exceed exec");
    if (t.dline <= t.arrival) add(t.id, label + ": deadline must be after arrival");
    if (std::find(seen.begin(), seen.end(), t.id) != seen.end()) {
      add(t.id, label + ": duplicate id");
    } else {
      seen.push_back(t.id);
    }
  }

  for (const auto& [id, core] : pf.pinned) {
    if (core < 1 || core > pf.cores) {
      add(id, "task " + std::to_string(id) + ": pinned core " + std::to_string(core) +
                  " outside [1, " + std::to_string(pf.cores) + "]");
    }
  }
  return out;
}

}  // namespace nuledf
