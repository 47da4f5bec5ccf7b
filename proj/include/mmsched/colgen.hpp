#pragma once

#include <ostream>
#include <string>

#include "mmsched/master.hpp"

namespace mmsched {

struct ColgenOptions {
  int n_cap = 6;              // candidate-set truncation per UE
  double eps_rc_rel = 1e-6;   // relative reduced-cost tolerance
  int max_iters = 500;
  int columns_per_slot = 4;   // k-best columns added per slot per iteration
  double bound_stop_rel = 1e-4;  // stop once the Lagrangian bound is this close
  double stab_alpha = 0.8;    // dual smoothing weight on the running center (0 = off)
  bool singleton_only = false;  // restrict joint transmission (no CoMP)
  double power_tol = 1.01;
  IpOptions ip;
  std::ostream* trace = nullptr;  // optional CSV iteration trace
};

struct SolveResult {
  std::string method;
  SolveStatus status = SolveStatus::Optimal;
  double objective = 0.0;  // bits/s summed over slots
  double lp_bound = 0.0;
  double gap = 0.0;        // (lp_bound - objective) / max(lp_bound, eps)
  Schedule schedule;
  int iterations = 0;
  int columns_generated = 0;
  double wall_time_s = 0.0;
  bool iteration_limit = false;
  DualPrices final_duals;
  std::vector<std::vector<Configuration>> columns;  // for validation/replay
};

double reduced_cost(const Configuration& cfg, const DualPrices& duals);

/// Column generation on the restricted master: alternate LP solves and
/// per-slot pricing, adding every configuration whose reduced cost clears the
/// tolerance, then solve the integer restricted master. The reported lp_bound
/// is the Lagrangian bound (restricted LP value plus the positive reduced
/// costs), so it stays a valid bound when bound_stop_rel ends the loop early.
/// On tiny instances
/// (few possible LOS links per slot) a remaining integrality gap triggers a
/// full column enumeration so the result is exactly optimal.
SolveResult run_mc_comp(const Scenario& scenario, const RadioParams& radio,
                        const TimingParams& timing, const ColgenOptions& options = {});

}  // namespace mmsched
