#pragma once

#include "mmsched/colgen.hpp"

namespace mmsched {

/// Multi-connectivity without CoMP: the column-generation pipeline with
/// combination sets restricted to at most one active link per UE.
SolveResult run_mc_nocomp(const Scenario& scenario, const RadioParams& radio,
                          const TimingParams& timing, const ColgenOptions& options = {});

/// Single-connectivity baseline: one monolithic BIP over active (AS) and
/// handover (HS) indicators. A fresh activation needs t_s consecutive LOS
/// handover slots; at most one link per UE per slot in either state.
/// The result's schedule uses 'A' for AS, 'H' for HS, 'I' otherwise.
SolveResult solve_sc(const Scenario& scenario, const RadioParams& radio,
                     const TimingParams& timing, const IpOptions& ip = {});

struct InterruptionStats {
  std::vector<int> per_ue;  // slots without any active link
  double mean = 0.0;
};

InterruptionStats count_interruptions(const Schedule& schedule);

/// Independent checker for the single-connectivity constraints.
std::vector<std::string> validate_sc(const Schedule& schedule, const Scenario& scenario,
                                     const TimingParams& timing, const RadioParams& radio,
                                     double power_tol = 1.01);

}  // namespace mmsched
