#pragma once

#include <algorithm>
#include <vector>

#include "nuledf/metrics.hpp"
#include "nuledf/model.hpp"

namespace nuledf {

enum class PolicyId { Edf, NulEdf };

/// Where a newly released task is placed under the non-uniform-laxity policy.
enum class Placement { ExecutionQueue, HoldingQueue, RejectTwoCore };

/// What happens to a task sitting in the holding queue.
enum class HoldingAction {
  Hold,
  DispatchUrgentSameCore,
  DispatchSameCore,
  DispatchNextCore,
  DiscardMissed,
};

/// Deadline order: ascending absolute deadline, ties broken by ascending id.
inline bool edf_before(const Task& a, const Task& b) {
  if (a.dline != b.dline) return a.dline < b.dline;
  return a.id < b.id;
}

inline std::vector<Task> edf_order(std::vector<Task> tasks) {
  std::sort(tasks.begin(), tasks.end(), edf_before);
  return tasks;
}

/// Slack absorbed when summing utilisations as doubles.
inline constexpr double kAdmitSlack = 1e-9;

/// Baseline admission test: a core accepts a task while its total
/// utilisation stays at or below 1.
inline bool edf_admit(double task_u, double core_load) {
  return core_load + task_u <= 1.0 + kAdmitSlack;
}

/// Initial placement by modified utilisation. Platforms of one or two cores
/// use the (z+1)/2 ceiling and reject outright above it; larger platforms
/// stage tasks below 2 in the holding queue.
inline Placement classify(double u2, int cores) {
  if (cores <= 2) {
    return u2 < two_core_bound(cores) ? Placement::ExecutionQueue : Placement::RejectTwoCore;
  }
  return u2 < 2.0 ? Placement::HoldingQueue : Placement::ExecutionQueue;
}

/// Decision for one holding-queue task given its current non-uniform laxity.
/// Positive laxity keeps holding; laxity at zero dispatches (urgently to the
/// same core below the u2 ceiling, otherwise to the next core); negative
/// laxity means the deadline is unreachable and the task is discarded. The
/// bound only changes how a discard is reported, not whether it happens.
inline HoldingAction evaluate_holding(double nlax, double u2, double bound, double epsilon) {
  (void)bound;
  if (nlax > epsilon) return HoldingAction::Hold;
  if (nlax >= -epsilon) {
    return u2 < 2.0 ? HoldingAction::DispatchUrgentSameCore : HoldingAction::DispatchNextCore;
  }
  return HoldingAction::DiscardMissed;
}

/// Round-robin successor over cores 1..m.
inline int next_core(int current, int cores) { return current % cores + 1; }

}  // namespace nuledf
