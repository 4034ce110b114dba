#pragma once

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "nuledf/model.hpp"

namespace nuledf {

/// Euler's number truncated to three decimals, the value the schedulability
/// bound is normally evaluated with. The exact constant is available behind
/// SimConfig::exact_euler.
inline constexpr double kEuler3 = 2.718;

/// Spare time before a task can no longer meet its deadline:
/// dline - (now + remaining). Negative once the deadline is unreachable.
inline double laxity(Tick dline, Tick now, Tick remaining_exec) {
  return static_cast<double>(dline - (now + remaining_exec));
}

/// Priority proxy: (quantum slice used / allocated time) * core total time.
inline double weight(Tick quant, Tick total, Tick ctot) {
  if (total <= 0) throw std::domain_error("weight: allocated time must be positive");
  return static_cast<double>(quant) / static_cast<double>(total) * static_cast<double>(ctot);
}

/// Laxity scaled by the task's weight, making slack priority-sensitive.
inline double non_uniform_laxity(double lax, double weight) {
  if (weight <= 0.0) throw std::domain_error("non_uniform_laxity: weight must be positive");
  return lax * weight;
}

/// Aperiodic task utilisation: execution time over the deadline window.
inline double utilisation(Tick exec, Tick dline_relative) {
  if (dline_relative <= 0) throw std::domain_error("utilisation: deadline window must be positive");
  return static_cast<double>(exec) / static_cast<double>(dline_relative);
}

/// Non-uniform laxity normalised by the absolute deadline.
inline double laxity_normalized_utilisation(double nlax, Tick dline) {
  if (dline <= 0) throw std::domain_error("laxity_normalized_utilisation: deadline must be positive");
  return nlax / static_cast<double>(dline);
}

/// Rationalisation multiplier applied to task utilisations: 1.5 + |u_max - 0.5|.
inline double modification_factor(double u_max) {
  return 1.5 + std::abs(u_max - 0.5);
}

inline double modified_utilisation(double u1, double u) { return u1 * u; }

/// Schedulability ceiling for z cores: z * (1 - 1/e).
inline double schedulability_bound(int cores, double euler = kEuler3) {
  if (cores < 1) throw std::domain_error("schedulability_bound: core count must be >= 1");
  return static_cast<double>(cores) * (1.0 - 1.0 / euler);
}

/// Utilisation ceiling for dual-core placement: (z + 1) / 2.
inline double two_core_bound(int cores) {
  return (static_cast<double>(cores) + 1.0) / 2.0;
}

/// All per-task metrics evaluated at one instant.
struct MetricSnapshot {
  double lax = 0.0;     // remaining slack, in ticks
  double weight = 0.0;  // (quant / exec) * ctot
  double nlax = 0.0;    // lax * weight
  double u = 0.0;       // exec over the arrival-to-deadline window
  double u_norm = 0.0;  // nlax over the absolute deadline
  double u2 = 0.0;      // u scaled by the modification factor
};

inline MetricSnapshot snapshot(const Task& t, Tick now, Tick remaining, double u1) {
  MetricSnapshot s;
  s.lax = laxity(t.dline, now, remaining);
  s.weight = weight(t.quant, t.exec, t.ctot);
  s.nlax = non_uniform_laxity(s.lax, s.weight);
  s.u = utilisation(t.exec, t.window());
  s.u_norm = laxity_normalized_utilisation(s.nlax, t.dline);
  s.u2 = modified_utilisation(u1, s.u);
  return s;
}

/// The bounds governing one run on a z-core platform.
struct BoundSet {
  double L = 0.0;         // z * (1 - 1/e)
  double two_core = 0.0;  // (z + 1) / 2
  double u1 = 0.0;        // modification factor
  double u_max = 0.0;
  double e = kEuler3;
};

inline BoundSet make_bounds(int cores, double u_max, bool exact_euler = false) {
  const double e = exact_euler ? std::numbers::e : kEuler3;
  return BoundSet{schedulability_bound(cores, e), two_core_bound(cores),
                  modification_factor(u_max), u_max, e};
}

/// Half-up rounding to two decimals for displayed values. The small guard
/// keeps exact halves (0.875, 0.315) from falling downward when the nearest
/// double sits a hair under the half boundary.
inline double display_round2(double x) {
  const double shifted = x * 100.0;
  const double r = x < 0.0 ? std::ceil(shifted - 0.5 - 1e-9) : std::floor(shifted + 0.5 + 1e-9);
  return r / 100.0;
}

}  // namespace nuledf
