#include "mmsched/baselines.hpp"

#include <chrono>
#include <cmath>

namespace mmsched {

SolveResult run_mc_nocomp(const Scenario& scenario, const RadioParams& radio,
                          const TimingParams& timing, const ColgenOptions& options) {
  ColgenOptions opt = options;
  opt.singleton_only = true;
  return run_mc_comp(scenario, radio, timing, opt);
}

SolveResult solve_sc(const Scenario& scenario, const RadioParams& radio,
                     const TimingParams& timing, const IpOptions& ip) {
  auto t0 = std::chrono::steady_clock::now();
  timing.validate();
  radio.validate();
  const int m = scenario.num_maps(), u = scenario.num_ues(), kk = scenario.num_slots();
  const double scale = 1e-9;

  LinearModel md;
  auto lid = [&](int i, int j, int k) { return (i * u + j) * kk + k; };
  // x_a then x_s, both boxed to LOS slots
  for (int i = 0; i < m; ++i) {
    for (int j = 0; j < u; ++j) {
      for (int k = 0; k < kk; ++k) {
        double r = scenario.los_at(i, j, k)
                       ? comp_rate_bps(radio.bandwidth_hz, {scenario.snr_at(i, j, k)})
                       : 0.0;
        md.add_var(0.0, scenario.los_at(i, j, k) ? 1.0 : 0.0, r * scale, true);
      }
    }
  }
  const int xs0 = md.num_vars();
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < u; ++j)
      for (int k = 0; k < kk; ++k)
        md.add_var(0.0, scenario.los_at(i, j, k) ? 1.0 : 0.0, 0.0, true);

  // one link per UE per slot, in either state
  for (int j = 0; j < u; ++j) {
    for (int k = 0; k < kk; ++k) {
      int r = md.add_row(RowSense::LE, 1.0);
      for (int i = 0; i < m; ++i) {
        md.add_entry(r, lid(i, j, k), 1.0);
        md.add_entry(r, xs0 + lid(i, j, k), 1.0);
      }
    }
  }
  // power budget per mmAP per slot, scaled by P_a for O(1) coefficients
  const double pa = dbm_to_mw(radio.p_a_dbm), ph = dbm_to_mw(radio.p_h_dbm);
  for (int i = 0; i < m; ++i) {
    for (int k = 0; k < kk; ++k) {
      int r = md.add_row(RowSense::LE, dbm_to_mw(radio.p_tot_dbm) * 1.01 / pa);
      for (int j = 0; j < u; ++j) {
        md.add_entry(r, lid(i, j, k), 1.0);
        md.add_entry(r, xs0 + lid(i, j, k), ph / pa);
      }
    }
  }
  // activation: x_a^k <= x_a^{k-1} + l^n x_s^n for every look-back slot n
  for (int i = 0; i < m; ++i) {
    for (int j = 0; j < u; ++j) {
      for (int k = 0; k < kk; ++k) {
        for (int n = k - timing.t_s; n <= k - 1; ++n) {
          int r = md.add_row(RowSense::GE, 0.0);
          md.add_entry(r, lid(i, j, k), -1.0);
          if (k - 1 >= 0) md.add_entry(r, lid(i, j, k - 1), 1.0);
          if (n >= 0 && scenario.los_at(i, j, n))
            md.add_entry(r, xs0 + lid(i, j, n), 1.0);
        }
      }
    }
  }
  md.check();

  SolveResult res;
  res.method = "sc";
  LpSolution lp = solve_lp(md);
  if (lp.status != SolveStatus::Optimal) {
    res.status = lp.status;
    return res;
  }
  res.lp_bound = lp.objective / scale;

  IpSolution sol = solve_bip(md, ip);
  res.status = sol.status;
  if (sol.status != SolveStatus::Optimal && sol.status != SolveStatus::TimeLimit) return res;
  res.objective = sol.objective / scale;
  res.gap = (res.lp_bound - res.objective) / std::max(res.lp_bound, 1e-9);
  if (res.gap < 0 && res.gap > -1e-9) res.gap = 0.0;

  Schedule& s = res.schedule;
  s.num_maps = m;
  s.num_ues = u;
  s.num_slots = kk;
  s.state.assign(static_cast<std::size_t>(m) * u * kk, 'I');
  s.chosen_config.assign(kk, -1);
  for (int i = 0; i < m; ++i) {
    for (int j = 0; j < u; ++j) {
      for (int k = 0; k < kk; ++k) {
        if (sol.x[lid(i, j, k)] > 0.5)
          s.state_at(i, j, k) = 'A';
        else if (sol.x[xs0 + lid(i, j, k)] > 0.5)
          s.state_at(i, j, k) = 'H';
      }
    }
  }
  res.wall_time_s =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return res;
}

InterruptionStats count_interruptions(const Schedule& schedule) {
  InterruptionStats st;
  st.per_ue.assign(schedule.num_ues, 0);
  for (int j = 0; j < schedule.num_ues; ++j) {
    for (int k = 0; k < schedule.num_slots; ++k) {
      bool active = false;
      for (int i = 0; i < schedule.num_maps && !active; ++i)
        active = schedule.state_at(i, j, k) == 'A';
      if (!active) ++st.per_ue[j];
    }
  }
  double sum = 0.0;
  for (int c : st.per_ue) sum += c;
  st.mean = schedule.num_ues > 0 ? sum / schedule.num_ues : 0.0;
  return st;
}

std::vector<std::string> validate_sc(const Schedule& sch, const Scenario& scenario,
                                     const TimingParams& timing, const RadioParams& radio,
                                     double power_tol) {
  std::vector<std::string> out;
  auto fail = [&out](std::string msg) { out.push_back(std::move(msg)); };
  const int m = sch.num_maps, u = sch.num_ues, kk = sch.num_slots;
  if (m != scenario.num_maps() || u != scenario.num_ues() || kk != scenario.num_slots()) {
    fail("dimension mismatch between schedule and scenario");
    return out;
  }
  for (int j = 0; j < u; ++j) {
    for (int k = 0; k < kk; ++k) {
      int busy = 0;
      for (int i = 0; i < m; ++i) {
        char st = sch.state_at(i, j, k);
        if (st == 'A' || st == 'H') ++busy;
        if (st == 'C') fail("sc schedule contains a C state");
      }
      if (busy > 1)
        fail("ue " + std::to_string(j) + " slot " + std::to_string(k) +
             ": more than one link in use");
    }
  }
  const double pa = dbm_to_mw(radio.p_a_dbm), ph = dbm_to_mw(radio.p_h_dbm);
  const double cap = dbm_to_mw(radio.p_tot_dbm) * power_tol;
  for (int i = 0; i < m; ++i) {
    for (int k = 0; k < kk; ++k) {
      double used = 0.0;
      for (int j = 0; j < u; ++j) {
        char st = sch.state_at(i, j, k);
        if (st == 'A') used += pa;
        if (st == 'H') used += ph;
      }
      if (used > cap + 1e-9)
        fail("mmAP " + std::to_string(i) + " slot " + std::to_string(k) +
             ": power budget exceeded");
    }
  }
  for (int i = 0; i < m; ++i) {
    for (int j = 0; j < u; ++j) {
      for (int k = 0; k < kk; ++k) {
        char st = sch.state_at(i, j, k);
        if (st != 'A' && st != 'H') continue;
        if (!scenario.los_at(i, j, k))
          fail("link (" + std::to_string(i) + "," + std::to_string(j) + ") slot " +
               std::to_string(k) + ": " + st + " state in NLOS");
        if (st != 'A') continue;
        bool prev_a = k > 0 && sch.state_at(i, j, k - 1) == 'A';
        bool switched = k - timing.t_s >= 0;
        for (int n = k - timing.t_s; switched && n <= k - 1; ++n)
          switched = sch.state_at(i, j, n) == 'H' && scenario.los_at(i, j, n);
        if (!prev_a && !switched)
          fail("link (" + std::to_string(i) + "," + std::to_string(j) + ") slot " +
               std::to_string(k) + ": active without a full handover chain");
      }
    }
  }
  return out;
}

}  // namespace mmsched
