#include "mmsched/master.hpp"

#include <cmath>
#include <stdexcept>

#include "json.hpp"

namespace mmsched {

void TimingParams::validate() const {
  if (t_ha < 1) throw std::invalid_argument("TimingParams: t_ha < 1");
  if (t_ch < 0) throw std::invalid_argument("TimingParams: t_ch < 0");
  if (t_s != t_ha + t_ch) throw std::invalid_argument("TimingParams: t_s != t_ha + t_ch");
}

std::string schedule_to_json(const Schedule& s) {
  nlohmann::json j;
  j["version"] = 1;
  j["num_maps"] = s.num_maps;
  j["num_ues"] = s.num_ues;
  j["num_slots"] = s.num_slots;
  auto states = nlohmann::json::array();
  for (int i = 0; i < s.num_maps; ++i) {
    auto per_ue = nlohmann::json::array();
    for (int q = 0; q < s.num_ues; ++q) {
      std::string row;
      for (int k = 0; k < s.num_slots; ++k) row.push_back(s.state_at(i, q, k));
      per_ue.push_back(row);
    }
    states.push_back(std::move(per_ue));
  }
  j["states"] = std::move(states);
  j["chosen_config"] = s.chosen_config;
  return j.dump();
}

Schedule schedule_from_json(const std::string& text) {
  auto j = nlohmann::json::parse(text);
  if (j.at("version").get<int>() != 1)
    throw std::invalid_argument("schedule_from_json: unsupported version");
  Schedule s;
  s.num_maps = j.at("num_maps").get<int>();
  s.num_ues = j.at("num_ues").get<int>();
  s.num_slots = j.at("num_slots").get<int>();
  s.state.assign(static_cast<std::size_t>(s.num_maps) * s.num_ues * s.num_slots, 'I');
  const auto& states = j.at("states");
  for (int i = 0; i < s.num_maps; ++i) {
    for (int q = 0; q < s.num_ues; ++q) {
      std::string row = states.at(i).at(q).get<std::string>();
      if (static_cast<int>(row.size()) != s.num_slots)
        throw std::invalid_argument("schedule_from_json: bad state row length");
      for (int k = 0; k < s.num_slots; ++k) s.state_at(i, q, k) = row[k];
    }
  }
  s.chosen_config = j.at("chosen_config").get<std::vector<int>>();
  if (static_cast<int>(s.chosen_config.size()) != s.num_slots)
    throw std::invalid_argument("schedule_from_json: bad chosen_config length");
  return s;
}

int MasterModel::add_column(int k, const Configuration& cfg) {
  int v = model.add_var(0.0, 1.0, cfg.total_rate() * obj_scale, true);
  model.add_entry(conv_row(k), v, 1.0);
  for (auto [i, j] : cfg.active_links) model.add_entry(link_row(i, j, k), v, 1.0);
  if (engine) {
    std::vector<std::pair<int, double>> col{{conv_row(k), 1.0}};
    for (auto [i, j] : cfg.active_links) col.emplace_back(link_row(i, j, k), 1.0);
    engine->add_var(0.0, 1.0, cfg.total_rate() * obj_scale, col);
  }
  columns[k].push_back(cfg);
  z_var[k].push_back(v);
  return v;
}

MasterModel build_master(const Scenario& scenario, const TimingParams& timing,
                         const RadioParams& radio,
                         const std::vector<std::vector<Configuration>>& columns,
                         double power_tol) {
  timing.validate();
  radio.validate();
  const int m = scenario.num_maps(), u = scenario.num_ues(), kk = scenario.num_slots();
  if (static_cast<int>(columns.size()) != kk)
    throw std::invalid_argument("build_master: need one column list per slot");

  MasterModel mm;
  mm.num_maps = m;
  mm.num_ues = u;
  mm.num_slots = kk;
  mm.power_tol = power_tol;
  mm.columns.assign(kk, {});
  mm.z_var.assign(kk, {});
  LinearModel& md = mm.model;

  // y variables; A is additionally boxed to LOS slots
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < u; ++j)
      for (int k = 0; k < kk; ++k)
        md.add_var(0.0, scenario.los_at(i, j, k) ? 1.0 : 0.0, 0.0, true);
  for (int q = 0; q < 2 * m * u * kk; ++q) md.add_var(0.0, 1.0, 0.0, true);

  // power budget per (mmAP, slot); the row is divided by P_a so that the
  // coefficients stay O(1) regardless of the dBm settings
  const double pa = dbm_to_mw(radio.p_a_dbm), ph = dbm_to_mw(radio.p_h_dbm);
  const double ptot = dbm_to_mw(radio.p_tot_dbm) * power_tol;
  for (int i = 0; i < m; ++i) {
    for (int k = 0; k < kk; ++k) {
      int r = md.add_row(RowSense::LE, ptot / pa);
      for (int j = 0; j < u; ++j) {
        md.add_entry(r, mm.ya_var(i, j, k), 1.0);
        md.add_entry(r, mm.yh_var(i, j, k), ph / pa);
      }
    }
  }
  // state exclusivity per link-slot
  for (int i = 0; i < m; ++i) {
    for (int j = 0; j < u; ++j) {
      for (int k = 0; k < kk; ++k) {
        int r = md.add_row(RowSense::LE, 1.0);
        md.add_entry(r, mm.ya_var(i, j, k), 1.0);
        md.add_entry(r, mm.yh_var(i, j, k), 1.0);
        md.add_entry(r, mm.yc_var(i, j, k), 1.0);
      }
    }
  }
  // convexity: at most one configuration per slot
  mm.conv_row0_ = md.num_rows();
  for (int k = 0; k < kk; ++k) md.add_row(RowSense::LE, 1.0);
  // linking: sum of alpha*z equals y_a
  mm.link_row0_ = md.num_rows();
  for (int i = 0; i < m; ++i) {
    for (int j = 0; j < u; ++j) {
      for (int k = 0; k < kk; ++k) {
        int r = md.add_row(RowSense::EQ, 0.0);
        md.add_entry(r, mm.ya_var(i, j, k), -1.0);
      }
    }
  }
  // H->A activation: y_a^k <= l^n y_h^n + y_a^{k-1} for every look-back n;
  // cold start: terms before slot 0 vanish (history all idle)
  for (int i = 0; i < m; ++i) {
    for (int j = 0; j < u; ++j) {
      for (int k = 0; k < kk; ++k) {
        for (int n = k - timing.t_ha; n <= k - 1; ++n) {
          int r = md.add_row(RowSense::GE, 0.0);
          md.add_entry(r, mm.ya_var(i, j, k), -1.0);
          if (n >= 0 && scenario.los_at(i, j, n))
            md.add_entry(r, mm.yh_var(i, j, n), 1.0);
          if (k - 1 >= 0) md.add_entry(r, mm.ya_var(i, j, k - 1), 1.0);
        }
      }
    }
  }
  // C->H activation: y_h^k <= y_c^n + y_h^{k-1} + y_a^{k-1}; NLOS-tolerant
  for (int i = 0; i < m; ++i) {
    for (int j = 0; j < u; ++j) {
      for (int k = 0; k < kk; ++k) {
        for (int n = k - timing.t_ch; n <= k - 1; ++n) {
          int r = md.add_row(RowSense::GE, 0.0);
          md.add_entry(r, mm.yh_var(i, j, k), -1.0);
          if (n >= 0) md.add_entry(r, mm.yc_var(i, j, n), 1.0);
          if (k - 1 >= 0) {
            md.add_entry(r, mm.yh_var(i, j, k - 1), 1.0);
            md.add_entry(r, mm.ya_var(i, j, k - 1), 1.0);
          }
        }
      }
    }
  }

  for (int k = 0; k < kk; ++k) {
    if (columns[k].empty())
      throw std::invalid_argument("build_master: every slot needs a seed column");
    for (const Configuration& cfg : columns[k]) mm.add_column(k, cfg);
  }
  md.check();
  return mm;
}

RelaxationResult solve_relaxation(MasterModel& master, const Basis*, Basis*) {
  if (!master.engine) master.engine = std::make_shared<IncrementalLp>(master.model);
  LpSolution lp = master.engine->solve();
  RelaxationResult res;
  res.status = lp.status;
  if (lp.status != SolveStatus::Optimal) return res;
  res.objective = lp.objective / master.obj_scale;
  res.duals = DualPrices::zeros(master.num_maps, master.num_ues, master.num_slots);
  for (int i = 0; i < master.num_maps; ++i)
    for (int j = 0; j < master.num_ues; ++j)
      for (int k = 0; k < master.num_slots; ++k)
        res.duals.lambda[master.lid(i, j, k)] =
            lp.row_duals[master.link_row(i, j, k)] / master.obj_scale;
  for (int k = 0; k < master.num_slots; ++k)
    res.duals.pi[k] = lp.row_duals[master.conv_row(k)] / master.obj_scale;
  return res;
}

IntegerResult solve_integer(const MasterModel& master, const IpOptions& opts) {
  IpSolution ip = solve_bip(master.model, opts);
  IntegerResult res;
  res.status = ip.status;
  if (ip.status != SolveStatus::Optimal && ip.status != SolveStatus::TimeLimit) return res;
  res.objective = ip.objective / master.obj_scale;
  Schedule& s = res.schedule;
  s.num_maps = master.num_maps;
  s.num_ues = master.num_ues;
  s.num_slots = master.num_slots;
  s.state.assign(static_cast<std::size_t>(s.num_maps) * s.num_ues * s.num_slots, 'I');
  for (int i = 0; i < s.num_maps; ++i) {
    for (int j = 0; j < s.num_ues; ++j) {
      for (int k = 0; k < s.num_slots; ++k) {
        if (ip.x[master.ya_var(i, j, k)] > 0.5)
          s.state_at(i, j, k) = 'A';
        else if (ip.x[master.yh_var(i, j, k)] > 0.5)
          s.state_at(i, j, k) = 'H';
        else if (ip.x[master.yc_var(i, j, k)] > 0.5)
          s.state_at(i, j, k) = 'C';
      }
    }
  }
  s.chosen_config.assign(s.num_slots, -1);
  for (int k = 0; k < s.num_slots; ++k) {
    for (std::size_t c = 0; c < master.z_var[k].size(); ++c) {
      if (ip.x[master.z_var[k][c]] > 0.5) {
        s.chosen_config[k] = static_cast<int>(c);
        break;
      }
    }
  }
  return res;
}

std::vector<std::string> validate_schedule(
    const Schedule& sch, const Scenario& scenario, const TimingParams& timing,
    const RadioParams& radio, const std::vector<std::vector<Configuration>>& columns,
    double power_tol) {
  std::vector<std::string> out;
  auto fail = [&out](std::string msg) { out.push_back(std::move(msg)); };
  const int m = sch.num_maps, u = sch.num_ues, kk = sch.num_slots;
  if (m != scenario.num_maps() || u != scenario.num_ues() || kk != scenario.num_slots()) {
    fail("dimension mismatch between schedule and scenario");
    return out;
  }
  for (char c : sch.state) {
    if (c != 'A' && c != 'H' && c != 'C' && c != 'I') {
      fail(std::string("invalid state character '") + c + "'");
      return out;
    }
  }

  // active links must match the chosen configuration exactly (2d/2e)
  for (int k = 0; k < kk; ++k) {
    int c = sch.chosen_config[k];
    if (c < -1 || c >= static_cast<int>(columns[k].size())) {
      fail("slot " + std::to_string(k) + ": configuration index out of range");
      continue;
    }
    std::vector<std::pair<int, int>> active;
    for (int i = 0; i < m; ++i)
      for (int j = 0; j < u; ++j)
        if (sch.state_at(i, j, k) == 'A') active.emplace_back(i, j);
    std::vector<std::pair<int, int>> expect;
    if (c >= 0) expect = columns[k][c].active_links;
    if (active != expect)
      fail("slot " + std::to_string(k) + ": active links differ from configuration (2e)");
  }

  // LOS rule and power budget
  const double pa = dbm_to_mw(radio.p_a_dbm), ph = dbm_to_mw(radio.p_h_dbm);
  const double cap = dbm_to_mw(radio.p_tot_dbm) * power_tol;
  for (int i = 0; i < m; ++i) {
    for (int k = 0; k < kk; ++k) {
      double used = 0.0;
      for (int j = 0; j < u; ++j) {
        char st = sch.state_at(i, j, k);
        if (st == 'A') {
          used += pa;
          if (!scenario.los_at(i, j, k))
            fail("link (" + std::to_string(i) + "," + std::to_string(j) + ") slot " +
                 std::to_string(k) + ": active in NLOS");
        } else if (st == 'H') {
          used += ph;
        }
      }
      if (used > cap + 1e-9)
        fail("mmAP " + std::to_string(i) + " slot " + std::to_string(k) +
             ": power budget exceeded (2b)");
    }
  }

  // state transitions (2f)/(2g) under cold start
  for (int i = 0; i < m; ++i) {
    for (int j = 0; j < u; ++j) {
      for (int k = 0; k < kk; ++k) {
        char st = sch.state_at(i, j, k);
        if (st == 'A') {
          bool prev_a = k > 0 && sch.state_at(i, j, k - 1) == 'A';
          bool warmed = k - timing.t_ha >= 0;
          for (int n = k - timing.t_ha; warmed && n <= k - 1; ++n)
            warmed = sch.state_at(i, j, n) == 'H' && scenario.los_at(i, j, n);
          if (!prev_a && !warmed)
            fail("link (" + std::to_string(i) + "," + std::to_string(j) + ") slot " +
                 std::to_string(k) + ": A without " + std::to_string(timing.t_ha) +
                 " prior LOS H slots (2f)");
        } else if (st == 'H' && timing.t_ch > 0) {
          bool prev_ha = k > 0 && (sch.state_at(i, j, k - 1) == 'H' ||
                                   sch.state_at(i, j, k - 1) == 'A');
          bool connected = k - timing.t_ch >= 0;
          for (int n = k - timing.t_ch; connected && n <= k - 1; ++n)
            connected = sch.state_at(i, j, n) == 'C';
          if (!prev_ha && !connected)
            fail("link (" + std::to_string(i) + "," + std::to_string(j) + ") slot " +
                 std::to_string(k) + ": H without " + std::to_string(timing.t_ch) +
                 " prior C slots (2g)");
        }
      }
    }
  }
  return out;
}

}  // namespace mmsched
