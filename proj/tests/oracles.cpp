#include "oracles.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>

namespace oracles {

using mmsched::kInf;
using mmsched::LinearModel;
using mmsched::RowSense;

namespace {

struct Tableau {
  // rows x (cols + 1), last column is the rhs
  int m = 0;
  int ncols = 0;
  std::vector<std::vector<double>> t;
  std::vector<int> basis;  // basic column per row

  double& at(int r, int c) { return t[r][c]; }
  double rhs(int r) const { return t[r][ncols]; }

  void pivot(int r, int c) {
    double p = t[r][c];
    for (int q = 0; q <= ncols; ++q) t[r][q] /= p;
    for (int i = 0; i < m; ++i) {
      if (i == r) continue;
      double f = t[i][c];
      if (f == 0.0) continue;
      for (int q = 0; q <= ncols; ++q) t[i][q] -= f * t[r][q];
    }
    basis[r] = c;
  }
};

// Bland's rule phase over the given cost vector (maximization).
// Returns false when unbounded.
bool run_phase(Tableau& tb, std::vector<double>& zrow, double zconst_unused) {
  (void)zconst_unused;
  for (;;) {
    int enter = -1;
    for (int c = 0; c < tb.ncols; ++c) {
      if (zrow[c] > 1e-9) {
        enter = c;
        break;
      }
    }
    if (enter < 0) return true;
    int leave = -1;
    double best = kInf;
    for (int r = 0; r < tb.m; ++r) {
      double a = tb.t[r][enter];
      if (a > 1e-9) {
        double ratio = tb.rhs(r) / a;
        if (ratio < best - 1e-12 ||
            (ratio < best + 1e-12 && (leave < 0 || tb.basis[r] < tb.basis[leave]))) {
          best = ratio;
          leave = r;
        }
      }
    }
    if (leave < 0) return false;
    tb.pivot(leave, enter);
    // update the cost row
    double f = zrow[enter];
    for (int q = 0; q < tb.ncols; ++q) zrow[q] -= f * tb.t[leave][q];
  }
}

double zrow_value(const Tableau& tb, const std::vector<double>& cost) {
  double v = 0.0;
  for (int r = 0; r < tb.m; ++r) {
    if (tb.basis[r] < static_cast<int>(cost.size())) {
      v += cost[tb.basis[r]] * tb.rhs(r);
    }
  }
  return v;
}

std::vector<double> make_zrow(const Tableau& tb, const std::vector<double>& cost) {
  std::vector<double> z(tb.ncols, 0.0);
  for (int c = 0; c < tb.ncols; ++c) {
    double v = c < static_cast<int>(cost.size()) ? cost[c] : 0.0;
    for (int r = 0; r < tb.m; ++r) {
      int b = tb.basis[r];
      double cb = b < static_cast<int>(cost.size()) ? cost[b] : 0.0;
      v -= cb * tb.t[r][c];
    }
    z[c] = v;
  }
  return z;
}

}  // namespace

LpResult tableau_simplex(const LinearModel& model) {
  const int n = model.num_vars();
  const int m0 = model.num_rows();

  // Substitute every variable by one or two nonnegative columns.
  // col_of_pos/col_of_neg give the standard-form column(s) per variable.
  struct Sub {
    int pos = -1;
    int neg = -1;      // for free variables, x = pos - neg
    double shift = 0;  // x = shift + pos  (or x = shift - pos when mirrored)
    bool mirrored = false;
    double explicit_ub = kInf;  // on the substituted column
  };
  std::vector<Sub> subs(n);
  int next = 0;
  double obj_const = 0.0;
  for (int j = 0; j < n; ++j) {
    Sub& s = subs[j];
    if (std::isfinite(model.lb[j])) {
      s.pos = next++;
      s.shift = model.lb[j];
      if (std::isfinite(model.ub[j])) s.explicit_ub = model.ub[j] - model.lb[j];
      obj_const += model.obj[j] * s.shift;
    } else if (std::isfinite(model.ub[j])) {
      s.pos = next++;
      s.shift = model.ub[j];
      s.mirrored = true;
      obj_const += model.obj[j] * s.shift;
    } else {
      s.pos = next++;
      s.neg = next++;
    }
  }
  int nbound = 0;
  for (auto& s : subs) {
    if (std::isfinite(s.explicit_ub)) ++nbound;
  }
  const int nrows = m0 + nbound;

  std::vector<std::vector<double>> a(nrows, std::vector<double>(next, 0.0));
  std::vector<double> b(nrows, 0.0);
  std::vector<RowSense> sense(nrows);
  for (int r = 0; r < m0; ++r) {
    sense[r] = model.sense[r];
    b[r] = model.rhs[r];
  }
  std::vector<double> cost(next, 0.0);
  for (int j = 0; j < n; ++j) {
    const Sub& s = subs[j];
    double sign = s.mirrored ? -1.0 : 1.0;
    cost[s.pos] += sign * model.obj[j];
    if (s.neg >= 0) cost[s.neg] -= model.obj[j];
  }
  for (const auto& e : model.entries) {
    const Sub& s = subs[e.col];
    double sign = s.mirrored ? -1.0 : 1.0;
    a[e.row][s.pos] += sign * e.val;
    if (s.neg >= 0) a[e.row][s.neg] -= e.val;
    b[e.row] -= e.val * s.shift;
  }
  int br = m0;
  for (int j = 0; j < n; ++j) {
    if (std::isfinite(subs[j].explicit_ub)) {
      a[br][subs[j].pos] = 1.0;
      b[br] = subs[j].explicit_ub;
      sense[br] = RowSense::LE;
      ++br;
    }
  }

  // normalize to nonnegative rhs
  for (int r = 0; r < nrows; ++r) {
    if (b[r] < 0) {
      for (double& v : a[r]) v = -v;
      b[r] = -b[r];
      sense[r] = sense[r] == RowSense::LE   ? RowSense::GE
                 : sense[r] == RowSense::GE ? RowSense::LE
                                            : RowSense::EQ;
    }
  }

  // slack / surplus / artificial columns
  int ncols = next;
  std::vector<int> slack_col(nrows, -1), art_col(nrows, -1);
  for (int r = 0; r < nrows; ++r) {
    if (sense[r] == RowSense::LE) {
      slack_col[r] = ncols++;
    } else if (sense[r] == RowSense::GE) {
      slack_col[r] = ncols++;  // surplus
      art_col[r] = ncols++;
    } else {
      art_col[r] = ncols++;
    }
  }

  Tableau tb;
  tb.m = nrows;
  tb.ncols = ncols;
  tb.t.assign(nrows, std::vector<double>(ncols + 1, 0.0));
  tb.basis.assign(nrows, -1);
  for (int r = 0; r < nrows; ++r) {
    for (int c = 0; c < next; ++c) tb.t[r][c] = a[r][c];
    tb.t[r][ncols] = b[r];
    if (sense[r] == RowSense::LE) {
      tb.t[r][slack_col[r]] = 1.0;
      tb.basis[r] = slack_col[r];
    } else if (sense[r] == RowSense::GE) {
      tb.t[r][slack_col[r]] = -1.0;
      tb.t[r][art_col[r]] = 1.0;
      tb.basis[r] = art_col[r];
    } else {
      tb.t[r][art_col[r]] = 1.0;
      tb.basis[r] = art_col[r];
    }
  }

  bool need_phase1 = false;
  for (int r = 0; r < nrows; ++r) {
    if (art_col[r] >= 0) need_phase1 = true;
  }
  if (need_phase1) {
    std::vector<double> c1(ncols, 0.0);
    for (int r = 0; r < nrows; ++r) {
      if (art_col[r] >= 0) c1[art_col[r]] = -1.0;
    }
    auto z1 = make_zrow(tb, c1);
    if (!run_phase(tb, z1, 0.0)) return {LpStatus::Infeasible, 0.0};
    double v = zrow_value(tb, c1);
    if (v < -1e-7 * (1.0 + std::abs(v))) return {LpStatus::Infeasible, 0.0};
    // pin artificials at zero by deleting their columns from pricing
    for (int r = 0; r < nrows; ++r) {
      if (art_col[r] < 0) continue;
      for (int i = 0; i < nrows; ++i) tb.t[i][art_col[r]] = 0.0;
    }
  }

  std::vector<double> c2(ncols, 0.0);
  for (int c = 0; c < next; ++c) c2[c] = cost[c];
  auto z2 = make_zrow(tb, c2);
  // artificial columns were zeroed; they can never price in
  if (!run_phase(tb, z2, 0.0)) return {LpStatus::Unbounded, 0.0};
  return {LpStatus::Optimal, zrow_value(tb, c2) + obj_const};
}

BipResult enumerate_bip(const LinearModel& model, double feas_tol) {
  const int n = model.num_vars();
  std::vector<int> bins;
  std::vector<double> x(n, 0.0);
  for (int j = 0; j < n; ++j) {
    if (model.is_integer[j]) {
      bins.push_back(j);
    } else {
      if (model.lb[j] != model.ub[j]) {
        throw std::invalid_argument("enumerate_bip: unfixed continuous variable");
      }
      x[j] = model.lb[j];
    }
  }
  if (bins.size() > 25) throw std::invalid_argument("enumerate_bip: too many binaries");

  BipResult best;
  const std::uint64_t total = 1ull << bins.size();
  for (std::uint64_t mask = 0; mask < total; ++mask) {
    for (size_t i = 0; i < bins.size(); ++i) x[bins[i]] = (mask >> i) & 1 ? 1.0 : 0.0;
    bool ok = true;
    for (size_t i = 0; i < bins.size() && ok; ++i) {
      int j = bins[i];
      ok = x[j] >= model.lb[j] - feas_tol && x[j] <= model.ub[j] + feas_tol;
    }
    if (!ok) continue;
    std::vector<double> act(model.num_rows(), 0.0);
    for (const auto& e : model.entries) act[e.row] += e.val * x[e.col];
    for (int r = 0; r < model.num_rows() && ok; ++r) {
      switch (model.sense[r]) {
        case RowSense::LE: ok = act[r] <= model.rhs[r] + feas_tol; break;
        case RowSense::GE: ok = act[r] >= model.rhs[r] - feas_tol; break;
        case RowSense::EQ: ok = std::abs(act[r] - model.rhs[r]) <= feas_tol; break;
      }
    }
    if (!ok) continue;
    double obj = 0.0;
    for (int j = 0; j < n; ++j) obj += model.obj[j] * x[j];
    if (!best.feasible || obj > best.objective + 1e-12) {
      best.feasible = true;
      best.objective = obj;
      best.x = x;
    }
  }
  return best;
}

namespace {
void price_rec(const std::vector<std::vector<PricingChoice>>& per_ue, int j,
               std::vector<int>& usage, int cap, double cur, double& best) {
  if (j == static_cast<int>(per_ue.size())) {
    best = std::max(best, cur);
    return;
  }
  for (const auto& c : per_ue[j]) {
    bool ok = true;
    for (int i : c.maps) ok = ok && usage[i] < cap;
    if (!ok) continue;
    for (int i : c.maps) ++usage[i];
    price_rec(per_ue, j + 1, usage, cap, cur + c.value, best);
    for (int i : c.maps) --usage[i];
  }
}
}  // namespace

double pricing_bruteforce(const std::vector<std::vector<PricingChoice>>& per_ue,
                          int num_maps, int cap) {
  std::vector<int> usage(num_maps, 0);
  double best = -1e300;
  price_rec(per_ue, 0, usage, cap, 0.0, best);
  return best;
}

double p1_bruteforce(const P1Instance& inst) {
  if (inst.t_ha != 1 || inst.t_ch > 1)
    throw std::invalid_argument("p1_bruteforce: only t_ha=1, t_ch<=1 supported");
  const int nl = inst.num_maps * inst.num_ues;
  if (nl > 10) throw std::invalid_argument("p1_bruteforce: instance too large");
  const long nstates = 1l << (2 * nl);  // 2 bits per link: 0=I,1=C,2=H,3=A
  auto link_state = [](long st, int l) { return (st >> (2 * l)) & 3; };
  auto los_at = [&inst](int i, int j, int k) {
    return inst.los[(static_cast<std::size_t>(i) * inst.num_ues + j) * inst.num_slots + k] !=
           0;
  };
  auto snr_at = [&inst](int i, int j, int k) {
    return inst.snr[(static_cast<std::size_t>(i) * inst.num_ues + j) * inst.num_slots + k];
  };

  const double neg = -1e300;
  std::vector<double> dp(nstates, neg), next(nstates);
  // slot -1: everything idle
  dp[0] = 0.0;
  for (int k = 0; k < inst.num_slots; ++k) {
    // enumerate candidate joint states for slot k with their slot reward
    std::vector<long> valid;
    std::vector<double> reward;
    for (long st = 0; st < nstates; ++st) {
      bool ok = true;
      std::vector<int> ah_per_map(inst.num_maps, 0);
      std::vector<int> act_per_ue(inst.num_ues, 0);
      std::vector<double> snr_sum(inst.num_ues, 0.0);
      for (int l = 0; l < nl && ok; ++l) {
        int i = l / inst.num_ues, j = l % inst.num_ues;
        int s = link_state(st, l);
        if (s == 3) {
          ok = los_at(i, j, k);
          snr_sum[j] += snr_at(i, j, k);
          ++act_per_ue[j];
        }
        if (s >= 2) ok = ok && ++ah_per_map[i] <= inst.cap;
        if (inst.singleton_only && act_per_ue[j] > 1) ok = false;
      }
      if (!ok) continue;
      double r = 0.0;
      for (int j = 0; j < inst.num_ues; ++j)
        if (snr_sum[j] > 0) r += inst.bandwidth_hz * std::log2(1.0 + snr_sum[j]);
      valid.push_back(st);
      reward.push_back(r);
    }
    std::fill(next.begin(), next.end(), neg);
    for (long prev = 0; prev < nstates; ++prev) {
      if (dp[prev] <= neg) continue;
      for (std::size_t vi = 0; vi < valid.size(); ++vi) {
        long st = valid[vi];
        bool ok = true;
        for (int l = 0; l < nl && ok; ++l) {
          int i = l / inst.num_ues, j = l % inst.num_ues;
          int cur = link_state(st, l);
          int pv = k > 0 ? link_state(prev, l) : 0;
          if (cur == 3) {
            // A needs prior A, or a LOS H in the single look-back slot
            ok = pv == 3 || (k > 0 && pv == 2 && los_at(i, j, k - 1));
          } else if (cur == 2 && inst.t_ch == 1) {
            // H needs prior H/A or one prior C slot
            ok = pv >= 1;
          }
        }
        if (!ok) continue;
        double v = dp[prev] + reward[vi];
        if (v > next[st]) next[st] = v;
      }
    }
    dp.swap(next);
  }
  double best = 0.0;
  for (double v : dp) best = std::max(best, v);
  return best;
}

double sc_bruteforce(const P1Instance& inst) {
  const int nl = inst.num_maps * inst.num_ues;
  const int ts = inst.t_ha + inst.t_ch;
  const int nper = ts + 2;  // 0 idle, 1..ts switching progress, ts+1 active
  long nstates = 1;
  for (int l = 0; l < nl; ++l) nstates *= nper;
  if (nstates > 2000000) throw std::invalid_argument("sc_bruteforce: too large");
  auto digit = [nper](long st, int l) {
    for (int q = 0; q < l; ++q) st /= nper;
    return static_cast<int>(st % nper);
  };
  auto los_at = [&inst](int i, int j, int k) {
    return inst.los[(static_cast<std::size_t>(i) * inst.num_ues + j) * inst.num_slots + k] !=
           0;
  };
  auto snr_at = [&inst](int i, int j, int k) {
    return inst.snr[(static_cast<std::size_t>(i) * inst.num_ues + j) * inst.num_slots + k];
  };

  const double neg = -1e300;
  std::vector<double> dp(nstates, neg), next(nstates);
  dp[0] = 0.0;
  for (int k = 0; k < inst.num_slots; ++k) {
    // joint states valid at slot k, with rewards
    std::vector<long> valid;
    std::vector<double> reward;
    for (long st = 0; st < nstates; ++st) {
      bool ok = true;
      std::vector<int> busy_ue(inst.num_ues, 0), busy_map(inst.num_maps, 0);
      double r = 0.0;
      for (int l = 0; l < nl && ok; ++l) {
        int c = digit(st, l);
        if (c == 0) continue;
        int i = l / inst.num_ues, j = l % inst.num_ues;
        ok = los_at(i, j, k) && ++busy_ue[j] <= 1 && ++busy_map[i] <= inst.cap;
        if (c == ts + 1) r += inst.bandwidth_hz * std::log2(1.0 + snr_at(i, j, k));
      }
      if (!ok) continue;
      valid.push_back(st);
      reward.push_back(r);
    }
    std::fill(next.begin(), next.end(), neg);
    for (long prev = 0; prev < nstates; ++prev) {
      if (dp[prev] <= neg) continue;
      for (std::size_t vi = 0; vi < valid.size(); ++vi) {
        long st = valid[vi];
        bool ok = true;
        for (int l = 0; l < nl && ok; ++l) {
          int c = digit(st, l);
          int p = k > 0 ? digit(prev, l) : 0;
          if (c >= 2 && c <= ts) ok = p == c - 1;
          else if (c == ts + 1) ok = p == ts || p == ts + 1;
          // c == 0 or c == 1 reachable from anything
        }
        if (!ok) continue;
        double v = dp[prev] + reward[vi];
        if (v > next[st]) next[st] = v;
      }
    }
    dp.swap(next);
  }
  double best = 0.0;
  for (double v : dp) best = std::max(best, v);
  return best;
}

double blockage_los_fraction(double inv_rate_ms, double dmin_ms, double dmax_ms,
                             double horizon_ms, std::uint64_t seed) {
  std::mt19937 rng(static_cast<unsigned>(seed));
  std::exponential_distribution<double> gap(1.0 / inv_rate_ms);
  std::uniform_real_distribution<double> dur(dmin_ms, dmax_ms);
  double t = 0.0, blocked = 0.0;
  while (t < horizon_ms) {
    t += gap(rng);
    if (t >= horizon_ms) break;
    double d = std::min(dur(rng), horizon_ms - t);
    blocked += d;
    t += d;
  }
  return 1.0 - blocked / horizon_ms;
}

}  // namespace oracles
