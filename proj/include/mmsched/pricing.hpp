#pragma once

#include <utility>
#include <vector>

#include "mmsched/scenario.hpp"

namespace mmsched {

/// Duals of the restricted master LP: lambda for the linking rows (one per
/// link-slot), pi for the per-slot convexity rows. Values in bits/s.
struct DualPrices {
  int num_maps = 0, num_ues = 0, num_slots = 0;
  std::vector<double> lambda;  // flattened M x U x K
  std::vector<double> pi;      // K

  double lambda_at(int i, int j, int k) const {
    return lambda[(static_cast<std::size_t>(i) * num_ues + j) * num_slots + k];
  }
  static DualPrices zeros(int m, int u, int k) {
    DualPrices d;
    d.num_maps = m;
    d.num_ues = u;
    d.num_slots = k;
    d.lambda.assign(static_cast<std::size_t>(m) * u * k, 0.0);
    d.pi.assign(k, 0.0);
    return d;
  }
};

/// Per-UE local enumeration set: LOS mmAPs within the radius, strongest first.
struct CandidateSet {
  int ue = 0;
  int slot = 0;
  std::vector<int> maps;
};

/// One column of the master problem: a joint set of active LOS links for one
/// slot, with the resulting per-UE joint-transmission rates.
struct Configuration {
  int slot = 0;
  std::vector<std::pair<int, int>> active_links;  // (map, ue), sorted
  std::vector<double> ue_rates;                   // size U, bits/s
  double reduced_cost = 0.0;

  double total_rate() const {
    double s = 0.0;
    for (double r : ue_rates) s += r;
    return s;
  }
};

/// Largest number of simultaneously powered links per mmAP given the budget,
/// with a 1% relative tolerance on the budget row.
int power_cap_links(const RadioParams& radio);

std::vector<CandidateSet> build_candidates(const Scenario& scenario,
                                           const RadioParams& radio, int k,
                                           double radius_m, int n_cap);

/// Exact pricing for slot k: maximizes sum of UE rates minus lambda charges
/// over per-UE link subsets under the per-mmAP active-link cap; reduced_cost
/// of the result additionally subtracts pi[k]. With singleton_only, subsets
/// are restricted to at most one link per UE (no joint transmission).
Configuration solve_pricing(int k, const DualPrices& duals,
                            const std::vector<CandidateSet>& candidates,
                            const Scenario& scenario, const RadioParams& radio,
                            int power_cap, bool singleton_only = false);

/// The `top` best distinct configurations for slot k, reduced cost descending.
/// Entry 0 matches solve_pricing; the rest seed extra columns per iteration.
std::vector<Configuration> solve_pricing_multi(
    int k, const DualPrices& duals, const std::vector<CandidateSet>& candidates,
    const Scenario& scenario, const RadioParams& radio, int power_cap, int top,
    bool singleton_only = false);

/// Every feasible configuration for slot k: all subsets of LOS links within
/// the radius that respect the per-mmAP cap (and, optionally, one link per
/// UE). Exponential in the LOS link count; callers must keep M*U tiny.
std::vector<Configuration> enumerate_all_configurations(const Scenario& scenario,
                                                        const RadioParams& radio, int k,
                                                        int power_cap,
                                                        bool singleton_only = false);

/// Initial columns: the empty configuration plus a greedy one (each mmAP takes
/// its strongest LOS UEs up to the cap, one link per UE).
std::vector<Configuration> seed_configurations(const Scenario& scenario,
                                               const RadioParams& radio, int k,
                                               int power_cap);

}  // namespace mmsched
