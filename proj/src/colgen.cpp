#include "mmsched/colgen.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <set>

namespace mmsched {

double reduced_cost(const Configuration& cfg, const DualPrices& duals) {
  double rc = cfg.total_rate() - duals.pi[cfg.slot];
  for (auto [i, j] : cfg.active_links) rc -= duals.lambda_at(i, j, cfg.slot);
  return rc;
}

SolveResult run_mc_comp(const Scenario& scenario, const RadioParams& radio,
                        const TimingParams& timing, const ColgenOptions& options) {
  auto t0 = std::chrono::steady_clock::now();
  const int kk = scenario.num_slots();
  const int cap = power_cap_links(radio);

  SolveResult res;
  res.method = options.singleton_only ? "mc_nocomp" : "mc_comp";

  std::vector<std::vector<Configuration>> seed(kk);
  std::vector<std::set<std::vector<std::pair<int, int>>>> known(kk);
  for (int k = 0; k < kk; ++k) {
    // greedy seeds use one link per UE, so they are valid in both modes
    seed[k] = seed_configurations(scenario, radio, k, cap);
    for (const Configuration& c : seed[k]) known[k].insert(c.active_links);
  }
  MasterModel master = build_master(scenario, timing, radio, seed, options.power_tol);

  std::vector<std::vector<CandidateSet>> candidates(kk);
  for (int k = 0; k < kk; ++k)
    candidates[k] = build_candidates(scenario, radio, k, radio.enum_radius_m, options.n_cap);

  if (options.trace) *options.trace << "iteration,lp_objective,max_reduced_cost,columns_added\n";

  double lp_obj = 0.0;
  double best_bound = kInf;
  DualPrices smooth;  // running center damping degenerate dual oscillation
  for (;;) {
    if (res.iterations >= options.max_iters) {
      res.iteration_limit = true;
      break;
    }
    ++res.iterations;
    RelaxationResult lp = solve_relaxation(master);
    if (lp.status != SolveStatus::Optimal) {
      res.status = lp.status;
      return res;
    }
    lp_obj = lp.objective;
    res.final_duals = lp.duals;

    const double a = options.stab_alpha;
    if (a <= 0.0 || res.iterations == 1) {
      smooth = lp.duals;
    } else {
      for (std::size_t q = 0; q < smooth.lambda.size(); ++q)
        smooth.lambda[q] = a * smooth.lambda[q] + (1.0 - a) * lp.duals.lambda[q];
      for (int k = 0; k < kk; ++k)
        smooth.pi[k] = a * smooth.pi[k] + (1.0 - a) * lp.duals.pi[k];
    }

    const double eps = options.eps_rc_rel * (1.0 + std::abs(lp_obj));
    double max_rc = -kInf;
    double sum_rc = 0.0;  // Lagrangian slack: lp optimum <= lp_obj + sum_rc
    int added = 0;
    for (int k = 0; k < kk; ++k) {
      // convergence and the bound come from the true duals; extra columns are
      // priced at the smoothed center to escape the degenerate tail
      Configuration exact = solve_pricing(k, lp.duals, candidates[k], scenario, radio,
                                          cap, options.singleton_only);
      max_rc = std::max(max_rc, exact.reduced_cost);
      sum_rc += std::max(exact.reduced_cost, 0.0);
      if (exact.reduced_cost > eps && known[k].insert(exact.active_links).second) {
        master.add_column(k, exact);
        ++added;
      }
      if (a > 0.0 && res.iterations > 1) {
        std::vector<Configuration> cfgs =
            solve_pricing_multi(k, smooth, candidates[k], scenario, radio, cap,
                                options.columns_per_slot, options.singleton_only);
        for (Configuration& cfg : cfgs) {
          if (cfg.reduced_cost > eps && known[k].insert(cfg.active_links).second) {
            master.add_column(k, cfg);
            ++added;
          }
        }
      } else {
        std::vector<Configuration> cfgs =
            solve_pricing_multi(k, lp.duals, candidates[k], scenario, radio, cap,
                                options.columns_per_slot, options.singleton_only);
        for (Configuration& cfg : cfgs) {
          if (cfg.reduced_cost > eps && known[k].insert(cfg.active_links).second) {
            master.add_column(k, cfg);
            ++added;
          }
        }
      }
    }
    best_bound = std::min(best_bound, lp_obj + sum_rc);
    res.columns_generated += added;
    if (options.trace)
      *options.trace << res.iterations << ',' << lp_obj << ',' << max_rc << ',' << added
                     << '\n';
    if (max_rc <= eps || added == 0) break;
    if (sum_rc <= options.bound_stop_rel * (1.0 + std::abs(lp_obj))) break;
  }
  res.lp_bound = std::isfinite(best_bound) ? best_bound : lp_obj;

  IntegerResult ip = solve_integer(master, options.ip);
  res.status = ip.status;
  res.objective = ip.objective;
  res.schedule = ip.schedule;

  // tiny instances: close any leftover gap exactly by enumerating all columns
  double gap_tol = 1e-9 * (1.0 + std::abs(res.lp_bound));
  if (res.lp_bound - res.objective > gap_tol &&
      scenario.num_maps() * scenario.num_ues() <= 6) {
    int added = 0;
    for (int k = 0; k < kk; ++k) {
      for (Configuration& cfg :
           enumerate_all_configurations(scenario, radio, k, cap, options.singleton_only)) {
        if (known[k].insert(cfg.active_links).second) {
          master.add_column(k, cfg);
          ++added;
        }
      }
    }
    if (added > 0) {
      IntegerResult full = solve_integer(master, options.ip);
      if (full.status == SolveStatus::Optimal && full.objective > res.objective) {
        res.objective = full.objective;
        res.schedule = full.schedule;
        res.status = full.status;
      }
    }
  }

  res.gap = (res.lp_bound - res.objective) / std::max(res.lp_bound, 1e-9);
  if (res.gap < 0 && res.gap > -1e-9) res.gap = 0.0;
  res.columns = master.columns;
  res.wall_time_s =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return res;
}

}  // namespace mmsched
