#pragma once

#include <memory>
#include <string>
#include <vector>

#include "mmsched/pricing.hpp"
#include "mmsched/solver.hpp"

namespace mmsched {

struct TimingParams {
  int t_ha = 1;  // slots of H before a link may become A
  int t_ch = 2;  // slots of C before a link may become H
  int t_s = 3;   // single-connectivity handover length (= t_ha + t_ch)

  void validate() const;  // throws std::invalid_argument
};

/// Decoded link states per (mmAP, UE, slot): 'A' active, 'H' hot stand-by,
/// 'C' connected, 'I' idle; plus the configuration chosen per slot (-1 none).
struct Schedule {
  int num_maps = 0, num_ues = 0, num_slots = 0;
  std::vector<char> state;
  std::vector<int> chosen_config;

  char state_at(int i, int j, int k) const {
    return state[(static_cast<std::size_t>(i) * num_ues + j) * num_slots + k];
  }
  char& state_at(int i, int j, int k) {
    return state[(static_cast<std::size_t>(i) * num_ues + j) * num_slots + k];
  }
};

std::string schedule_to_json(const Schedule& s);
Schedule schedule_from_json(const std::string& text);

/// Restricted master problem over per-slot column subsets. Keeps the index
/// maps needed to pull duals and to append columns between LP solves.
/// Rates are scaled to Gbit/s inside the model; objectives and duals are
/// reported unscaled (bits/s).
struct MasterModel {
  LinearModel model;
  int num_maps = 0, num_ues = 0, num_slots = 0;
  double obj_scale = 1e-9;
  double power_tol = 1.01;
  std::vector<std::vector<Configuration>> columns;  // per slot
  std::vector<std::vector<int>> z_var;              // per slot, model var per column
  std::shared_ptr<IncrementalLp> engine;            // lazy, kept in sync by add_column

  int ya_var(int i, int j, int k) const { return lid(i, j, k); }
  int yh_var(int i, int j, int k) const { return n_links() + lid(i, j, k); }
  int yc_var(int i, int j, int k) const { return 2 * n_links() + lid(i, j, k); }
  int conv_row(int k) const { return conv_row0_ + k; }
  int link_row(int i, int j, int k) const { return link_row0_ + lid(i, j, k); }

  /// Appends one column (variable + conv/link row entries); returns its var.
  int add_column(int k, const Configuration& cfg);

  int n_links() const { return num_maps * num_ues * num_slots; }
  int lid(int i, int j, int k) const {
    return (i * num_ues + j) * num_slots + k;
  }
  int conv_row0_ = 0, link_row0_ = 0;
};

/// Builds the restricted master: objective = sum of column rates; rows are
/// the per-mmAP power budget (linear mW, rhs scaled by power_tol), per-link
/// state exclusivity, per-slot convexity, active-link linking equalities, and
/// the H->A / C->H activation inequalities (one row per look-back slot).
/// History before slot 0 is all-idle (cold start).
MasterModel build_master(const Scenario& scenario, const TimingParams& timing,
                         const RadioParams& radio,
                         const std::vector<std::vector<Configuration>>& columns,
                         double power_tol = 1.01);

struct RelaxationResult {
  SolveStatus status = SolveStatus::Optimal;
  double objective = 0.0;  // bits/s summed over slots
  DualPrices duals;
};

/// Solves the LP relaxation through a persistent incremental session owned by
/// the master, so repeated calls between add_column batches stay warm. The
/// basis arguments are accepted for compatibility and ignored.
RelaxationResult solve_relaxation(MasterModel& master, const Basis* warm_start = nullptr,
                                  Basis* basis_out = nullptr);

struct IntegerResult {
  SolveStatus status = SolveStatus::Optimal;
  double objective = 0.0;  // bits/s summed over slots
  Schedule schedule;
};

IntegerResult solve_integer(const MasterModel& master, const IpOptions& opts = {});

/// Independent checker: re-verifies every constraint of the scheduling
/// problem from raw scenario data (not from the LP rows). Empty result means
/// the schedule is feasible.
std::vector<std::string> validate_schedule(
    const Schedule& schedule, const Scenario& scenario, const TimingParams& timing,
    const RadioParams& radio, const std::vector<std::vector<Configuration>>& columns,
    double power_tol = 1.01);

}  // namespace mmsched
