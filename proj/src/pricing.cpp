#include "mmsched/pricing.hpp"

#include <algorithm>
#include <cmath>

namespace mmsched {

int power_cap_links(const RadioParams& radio) {
  double budget = 1.01 * dbm_to_mw(radio.p_tot_dbm);
  int n = static_cast<int>(std::floor(budget / dbm_to_mw(radio.p_a_dbm) + 1e-12));
  return std::max(n, 0);
}

std::vector<CandidateSet> build_candidates(const Scenario& scenario,
                                           const RadioParams& radio, int k,
                                           double radius_m, int n_cap) {
  const int m = scenario.num_maps(), u = scenario.num_ues();
  std::vector<CandidateSet> out(u);
  for (int j = 0; j < u; ++j) {
    CandidateSet& cs = out[j];
    cs.ue = j;
    cs.slot = k;
    for (int i = 0; i < m; ++i) {
      if (scenario.los_at(i, j, k) && scenario.distance2d_at(i, j, k) <= radius_m)
        cs.maps.push_back(i);
    }
    std::stable_sort(cs.maps.begin(), cs.maps.end(), [&](int a, int b) {
      return scenario.snr_at(a, j, k) > scenario.snr_at(b, j, k);
    });
    if (static_cast<int>(cs.maps.size()) > n_cap) cs.maps.resize(n_cap);
    (void)radio;
  }
  return out;
}

namespace {

struct Subset {
  double value = 0.0;   // rate minus lambda charges
  double rate = 0.0;
  std::vector<int> maps;  // ascending mmAP indices
};

// All link subsets of one candidate set, best value first; ties prefer fewer
// links then the lexicographically smaller map set, so the search is
// deterministic and biased toward small configurations.
std::vector<Subset> enumerate_subsets(const CandidateSet& cs, const DualPrices& duals,
                                      const Scenario& scenario, const RadioParams& radio,
                                      int k, bool singleton_only) {
  const int n = static_cast<int>(cs.maps.size());
  std::vector<Subset> subsets;
  for (unsigned mask = 0; mask < (1u << n); ++mask) {
    int bits = __builtin_popcount(mask);
    if (singleton_only && bits > 1) continue;
    Subset s;
    std::vector<double> snrs;
    for (int b = 0; b < n; ++b) {
      if (!(mask & (1u << b))) continue;
      int i = cs.maps[b];
      s.maps.push_back(i);
      snrs.push_back(scenario.snr_at(i, cs.ue, k));
      s.value -= duals.lambda_at(i, cs.ue, k);
    }
    std::sort(s.maps.begin(), s.maps.end());
    s.rate = comp_rate_bps(radio.bandwidth_hz, snrs);
    s.value += s.rate;
    subsets.push_back(std::move(s));
  }
  std::stable_sort(subsets.begin(), subsets.end(), [](const Subset& a, const Subset& b) {
    if (a.value != b.value) return a.value > b.value;
    if (a.maps.size() != b.maps.size()) return a.maps.size() < b.maps.size();
    return a.maps < b.maps;
  });
  return subsets;
}

// k-best DFS over one subset choice per UE under the per-mmAP usage cap.
// The pool keeps the `keep` highest-value complete selections; pruning uses
// the pool floor, so the search stays exact for every kept entry.
struct Search {
  const std::vector<std::vector<Subset>>* per_ue;
  std::vector<double> suffix_best;
  std::vector<int> usage;
  int cap = 0;
  int keep = 1;
  std::vector<int> pick;
  std::vector<std::pair<double, std::vector<int>>> pool;  // value descending

  double floor_value() const {
    // an empty selection scores 0, so anything kept must beat -1
    return static_cast<int>(pool.size()) < keep ? -1.0 : pool.back().first;
  }

  void offer(double cur) {
    if (cur <= floor_value()) return;
    auto it = std::upper_bound(
        pool.begin(), pool.end(), cur,
        [](double v, const std::pair<double, std::vector<int>>& e) {
          return v > e.first;
        });
    pool.insert(it, {cur, pick});
    if (static_cast<int>(pool.size()) > keep) pool.pop_back();
  }

  void dfs(int j, double cur) {
    if (j == static_cast<int>(per_ue->size())) {
      offer(cur);
      return;
    }
    if (cur + suffix_best[j] <= floor_value()) return;
    const auto& subsets = (*per_ue)[j];
    for (int e = 0; e < static_cast<int>(subsets.size()); ++e) {
      const Subset& s = subsets[e];
      // subsets are sorted by value, so the rest cannot beat the pool floor
      if (cur + s.value + suffix_best[j + 1] <= floor_value()) break;
      bool ok = true;
      for (int i : s.maps) {
        if (usage[i] >= cap) {
          ok = false;
          break;
        }
      }
      if (!ok) continue;
      for (int i : s.maps) ++usage[i];
      pick[j] = e;
      dfs(j + 1, cur + s.value);
      for (int i : s.maps) --usage[i];
    }
  }
};

}  // namespace

std::vector<Configuration> solve_pricing_multi(
    int k, const DualPrices& duals, const std::vector<CandidateSet>& candidates,
    const Scenario& scenario, const RadioParams& radio, int power_cap, int top,
    bool singleton_only) {
  const int u = static_cast<int>(candidates.size());
  std::vector<std::vector<Subset>> per_ue(u);
  for (int j = 0; j < u; ++j)
    per_ue[j] = enumerate_subsets(candidates[j], duals, scenario, radio, k, singleton_only);

  Search srch;
  srch.per_ue = &per_ue;
  srch.usage.assign(scenario.num_maps(), 0);
  srch.cap = power_cap;
  srch.keep = std::max(top, 1);
  srch.pick.assign(u, 0);
  srch.suffix_best.assign(u + 1, 0.0);
  for (int j = u - 1; j >= 0; --j) {
    double m = 0.0;
    for (const Subset& s : per_ue[j]) m = std::max(m, s.value);
    srch.suffix_best[j] = srch.suffix_best[j + 1] + m;
  }
  srch.dfs(0, 0.0);

  std::vector<Configuration> out;
  out.reserve(srch.pool.size());
  for (const auto& [value, pick] : srch.pool) {
    Configuration cfg;
    cfg.slot = k;
    cfg.ue_rates.assign(scenario.num_ues(), 0.0);
    for (int j = 0; j < u; ++j) {
      const Subset& s = per_ue[j][pick[j]];
      for (int i : s.maps) cfg.active_links.emplace_back(i, candidates[j].ue);
      cfg.ue_rates[candidates[j].ue] = s.rate;
    }
    std::sort(cfg.active_links.begin(), cfg.active_links.end());
    cfg.reduced_cost = value - duals.pi[k];
    out.push_back(std::move(cfg));
  }
  return out;
}

Configuration solve_pricing(int k, const DualPrices& duals,
                            const std::vector<CandidateSet>& candidates,
                            const Scenario& scenario, const RadioParams& radio,
                            int power_cap, bool singleton_only) {
  return solve_pricing_multi(k, duals, candidates, scenario, radio, power_cap, 1,
                             singleton_only)
      .front();
}

std::vector<Configuration> enumerate_all_configurations(const Scenario& scenario,
                                                        const RadioParams& radio, int k,
                                                        int power_cap,
                                                        bool singleton_only) {
  const int m = scenario.num_maps(), u = scenario.num_ues();
  std::vector<std::pair<int, int>> links;
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < u; ++j)
      if (scenario.los_at(i, j, k) && scenario.distance2d_at(i, j, k) <= radio.enum_radius_m)
        links.emplace_back(i, j);
  const int n = static_cast<int>(links.size());
  if (n > 20) throw std::invalid_argument("enumerate_all_configurations: too many links");

  std::vector<Configuration> out;
  for (unsigned mask = 0; mask < (1u << n); ++mask) {
    std::vector<int> per_map(m, 0), per_ue(u, 0);
    bool ok = true;
    for (int b = 0; b < n && ok; ++b) {
      if (!(mask & (1u << b))) continue;
      ok = ++per_map[links[b].first] <= power_cap;
      if (singleton_only) ok = ok && ++per_ue[links[b].second] <= 1;
    }
    if (!ok) continue;
    Configuration cfg;
    cfg.slot = k;
    cfg.ue_rates.assign(u, 0.0);
    std::vector<double> snr_sum(u, 0.0);
    for (int b = 0; b < n; ++b) {
      if (!(mask & (1u << b))) continue;
      cfg.active_links.push_back(links[b]);
      snr_sum[links[b].second] += scenario.snr_at(links[b].first, links[b].second, k);
    }
    for (int j = 0; j < u; ++j)
      if (snr_sum[j] > 0)
        cfg.ue_rates[j] = comp_rate_bps(radio.bandwidth_hz, {snr_sum[j]});
    std::sort(cfg.active_links.begin(), cfg.active_links.end());
    out.push_back(std::move(cfg));
  }
  return out;
}

std::vector<Configuration> seed_configurations(const Scenario& scenario,
                                               const RadioParams& radio, int k,
                                               int power_cap) {
  const int m = scenario.num_maps(), u = scenario.num_ues();
  std::vector<Configuration> out;
  Configuration empty;
  empty.slot = k;
  empty.ue_rates.assign(u, 0.0);
  out.push_back(empty);

  Configuration greedy = empty;
  std::vector<char> assigned(u, 0);
  for (int i = 0; i < m; ++i) {
    std::vector<int> ues;
    for (int j = 0; j < u; ++j) {
      if (!assigned[j] && scenario.los_at(i, j, k) &&
          scenario.distance2d_at(i, j, k) <= radio.enum_radius_m)
        ues.push_back(j);
    }
    std::stable_sort(ues.begin(), ues.end(), [&](int a, int b) {
      return scenario.snr_at(i, a, k) > scenario.snr_at(i, b, k);
    });
    if (static_cast<int>(ues.size()) > power_cap) ues.resize(power_cap);
    for (int j : ues) {
      assigned[j] = 1;
      greedy.active_links.emplace_back(i, j);
      greedy.ue_rates[j] = comp_rate_bps(radio.bandwidth_hz, {scenario.snr_at(i, j, k)});
    }
  }
  std::sort(greedy.active_links.begin(), greedy.active_links.end());
  if (!greedy.active_links.empty()) out.push_back(std::move(greedy));
  return out;
}

}  // namespace mmsched
