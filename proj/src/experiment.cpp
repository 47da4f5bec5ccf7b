#include "mmsched/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <set>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "json.hpp"
#include "mmsched/rng.hpp"

namespace mmsched {

namespace {

const std::set<std::string> kSweepKeys = {"num_maps", "power_links",
                                          "blockage_inv_rate_ms"};
const std::set<std::string> kMethods = {"mc_comp", "mc_nocomp", "sc", "bound"};

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

void check_keys(const nlohmann::json& j, const std::set<std::string>& allowed,
                const std::string& where) {
  if (!j.is_object())
    throw std::invalid_argument("config: " + where + " must be an object");
  for (auto it = j.begin(); it != j.end(); ++it) {
    if (!allowed.count(it.key()))
      throw std::invalid_argument("config: unknown key \"" + it.key() + "\" in " + where);
  }
}

template <typename T>
void get_if(const nlohmann::json& j, const char* key, T& out) {
  if (j.contains(key)) out = j.at(key).get<T>();
}

}  // namespace

void ExperimentConfig::validate() const {
  scenario.validate();
  radio.validate();
  timing.validate();
  if (!kSweepKeys.count(sweep_key))
    throw std::invalid_argument("ExperimentConfig: unknown sweep key \"" + sweep_key + "\"");
  if (sweep_values.empty())
    throw std::invalid_argument("ExperimentConfig: sweep values empty");
  for (double v : sweep_values) {
    if (!std::isfinite(v) || v <= 0)
      throw std::invalid_argument("ExperimentConfig: sweep values must be positive");
    if (sweep_key != "blockage_inv_rate_ms" && v != std::floor(v))
      throw std::invalid_argument("ExperimentConfig: " + sweep_key +
                                  " sweep needs integer values");
  }
  if (replications < 1)
    throw std::invalid_argument("ExperimentConfig: replications < 1");
  if (methods.empty()) throw std::invalid_argument("ExperimentConfig: methods empty");
  std::set<std::string> seen;
  for (const std::string& m : methods) {
    if (!kMethods.count(m))
      throw std::invalid_argument("ExperimentConfig: unknown method \"" + m + "\"");
    if (!seen.insert(m).second)
      throw std::invalid_argument("ExperimentConfig: duplicate method \"" + m + "\"");
  }
  if (solver.ip_rel_gap < 0 || solver.ip_node_limit < 1 ||
      solver.columns_per_slot < 1 || solver.max_colgen_iters < 1)
    throw std::invalid_argument("ExperimentConfig: bad solver settings");
}

ExperimentConfig config_from_json(const std::string& text) {
  nlohmann::json j = nlohmann::json::parse(text);
  check_keys(j,
             {"scenario", "radio", "timing", "solver", "sweep", "replications",
              "methods", "output_dir", "master_seed"},
             "top level");
  ExperimentConfig cfg;
  if (j.contains("scenario")) {
    const auto& s = j.at("scenario");
    // rng_seed is deliberately not accepted: cell seeds come from master_seed
    check_keys(s,
               {"area_side_m", "num_maps", "num_ues", "num_slots", "slot_duration_ms",
                "ue_speed_kmh", "blockage_inv_rate_ms", "blockage_min_ms",
                "blockage_max_ms"},
               "scenario");
    get_if(s, "area_side_m", cfg.scenario.area_side_m);
    get_if(s, "num_maps", cfg.scenario.num_maps);
    get_if(s, "num_ues", cfg.scenario.num_ues);
    get_if(s, "num_slots", cfg.scenario.num_slots);
    get_if(s, "slot_duration_ms", cfg.scenario.slot_duration_ms);
    get_if(s, "ue_speed_kmh", cfg.scenario.ue_speed_kmh);
    get_if(s, "blockage_inv_rate_ms", cfg.scenario.blockage_inv_rate_ms);
    get_if(s, "blockage_min_ms", cfg.scenario.blockage_min_ms);
    get_if(s, "blockage_max_ms", cfg.scenario.blockage_max_ms);
  }
  if (j.contains("radio")) {
    const auto& r = j.at("radio");
    check_keys(r,
               {"p_tot_dbm", "p_a_dbm", "p_h_dbm", "g_a_dbi", "g_u_dbi", "h_bs_m",
                "h_ut_m", "f_c_ghz", "p_n_dbm", "bandwidth_hz", "enum_radius_m"},
               "radio");
    get_if(r, "p_tot_dbm", cfg.radio.p_tot_dbm);
    get_if(r, "p_a_dbm", cfg.radio.p_a_dbm);
    get_if(r, "p_h_dbm", cfg.radio.p_h_dbm);
    get_if(r, "g_a_dbi", cfg.radio.g_a_dbi);
    get_if(r, "g_u_dbi", cfg.radio.g_u_dbi);
    get_if(r, "h_bs_m", cfg.radio.h_bs_m);
    get_if(r, "h_ut_m", cfg.radio.h_ut_m);
    get_if(r, "f_c_ghz", cfg.radio.f_c_ghz);
    get_if(r, "p_n_dbm", cfg.radio.p_n_dbm);
    get_if(r, "bandwidth_hz", cfg.radio.bandwidth_hz);
    get_if(r, "enum_radius_m", cfg.radio.enum_radius_m);
  }
  if (j.contains("timing")) {
    const auto& t = j.at("timing");
    check_keys(t, {"t_ha", "t_ch", "t_s"}, "timing");
    get_if(t, "t_ha", cfg.timing.t_ha);
    get_if(t, "t_ch", cfg.timing.t_ch);
    cfg.timing.t_s = cfg.timing.t_ha + cfg.timing.t_ch;
    get_if(t, "t_s", cfg.timing.t_s);
  }
  if (j.contains("solver")) {
    const auto& s = j.at("solver");
    check_keys(s, {"ip_rel_gap", "ip_node_limit", "columns_per_slot", "max_colgen_iters"},
               "solver");
    get_if(s, "ip_rel_gap", cfg.solver.ip_rel_gap);
    get_if(s, "ip_node_limit", cfg.solver.ip_node_limit);
    get_if(s, "columns_per_slot", cfg.solver.columns_per_slot);
    get_if(s, "max_colgen_iters", cfg.solver.max_colgen_iters);
  }
  if (j.contains("sweep")) {
    const auto& s = j.at("sweep");
    check_keys(s, {"key", "values"}, "sweep");
    cfg.sweep_key = s.at("key").get<std::string>();
    cfg.sweep_values = s.at("values").get<std::vector<double>>();
  }
  get_if(j, "replications", cfg.replications);
  get_if(j, "methods", cfg.methods);
  get_if(j, "output_dir", cfg.output_dir);
  get_if(j, "master_seed", cfg.master_seed);
  cfg.validate();
  return cfg;
}

std::uint64_t cell_seed(std::uint64_t master_seed, int replication) {
  return derive_seed(master_seed, 0x5EEDu, static_cast<std::uint64_t>(replication));
}

double power_links_to_dbm(double p_a_dbm, int links) {
  return p_a_dbm + 10.0 * std::log10(static_cast<double>(links));
}

namespace {

struct Cell {
  int sweep_index = 0;
  double sweep_value = 0;
  int replication = 0;
  std::uint64_t seed = 0;
  std::vector<MetricsRow> rows;
};

MetricsRow base_row(const Cell& cell, const std::string& method) {
  MetricsRow row;
  row.sweep_value = cell.sweep_value;
  row.method = method;
  row.child_seed = cell.seed;
  row.status = "ok";
  return row;
}

void fill_from_result(MetricsRow& row, const SolveResult& res, int num_slots) {
  if (res.status != SolveStatus::Optimal) {
    row.status = to_string(res.status);
    return;
  }
  row.network_throughput = res.objective / num_slots;
  row.lp_bound = res.lp_bound;
  row.gap = res.gap;
  row.mean_interruption_slots = count_interruptions(res.schedule).mean;
  row.iterations = res.iterations;
  row.wall_time_s = res.wall_time_s;
}

void run_cell(const ExperimentConfig& cfg, Cell& cell) {
  ScenarioParams sp = cfg.scenario;
  RadioParams radio = cfg.radio;
  if (cfg.sweep_key == "num_maps") {
    sp.num_maps = static_cast<int>(cell.sweep_value);
  } else if (cfg.sweep_key == "power_links") {
    radio.p_tot_dbm =
        power_links_to_dbm(radio.p_a_dbm, static_cast<int>(cell.sweep_value));
  } else {
    sp.blockage_inv_rate_ms = cell.sweep_value;
  }
  sp.rng_seed = cell.seed;

  ColgenOptions co;
  co.ip.rel_gap = cfg.solver.ip_rel_gap;
  co.ip.node_limit = cfg.solver.ip_node_limit;
  co.columns_per_slot = cfg.solver.columns_per_slot;
  co.max_iters = cfg.solver.max_colgen_iters;
  IpOptions sc_ip;
  sc_ip.rel_gap = cfg.solver.ip_rel_gap;
  sc_ip.node_limit = cfg.solver.ip_node_limit;

  Scenario scenario;
  try {
    scenario = generate(sp, radio);
  } catch (const std::exception& e) {
    for (const std::string& m : cfg.methods) {
      MetricsRow row = base_row(cell, m);
      row.status = std::string("error: ") + e.what();
      cell.rows.push_back(std::move(row));
    }
    return;
  }

  SolveResult comp_cache;
  bool have_comp = false;
  for (const std::string& m : cfg.methods) {
    MetricsRow row = base_row(cell, m);
    try {
      if (m == "mc_comp" || m == "bound") {
        if (!have_comp) {
          comp_cache = run_mc_comp(scenario, radio, cfg.timing, co);
          have_comp = true;
        }
        if (m == "mc_comp") {
          fill_from_result(row, comp_cache, sp.num_slots);
        } else if (comp_cache.status != SolveStatus::Optimal) {
          row.status = to_string(comp_cache.status);
        } else {
          row.network_throughput = comp_cache.lp_bound / sp.num_slots;
          row.lp_bound = comp_cache.lp_bound;
          row.iterations = comp_cache.iterations;
          row.wall_time_s = comp_cache.wall_time_s;
        }
      } else if (m == "mc_nocomp") {
        fill_from_result(row, run_mc_nocomp(scenario, radio, cfg.timing, co),
                         sp.num_slots);
      } else {
        fill_from_result(row, solve_sc(scenario, radio, cfg.timing, sc_ip),
                         sp.num_slots);
      }
    } catch (const std::exception& e) {
      row.status = std::string("error: ") + e.what();
    }
    cell.rows.push_back(std::move(row));
  }
}

}  // namespace

ExperimentResult run_experiment(const ExperimentConfig& config, int jobs) {
  config.validate();
  if (jobs < 1) jobs = 1;

  std::vector<Cell> cells;
  for (int si = 0; si < static_cast<int>(config.sweep_values.size()); ++si) {
    for (int rep = 0; rep < config.replications; ++rep) {
      Cell c;
      c.sweep_index = si;
      c.sweep_value = config.sweep_values[si];
      c.replication = rep;
      c.seed = cell_seed(config.master_seed, rep);
      cells.push_back(c);
    }
  }

  if (jobs == 1) {
    for (Cell& c : cells) run_cell(config, c);
  } else {
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
      for (;;) {
        std::size_t i = next.fetch_add(1);
        if (i >= cells.size()) return;
        run_cell(config, cells[i]);
      }
    };
    std::vector<std::thread> pool;
    for (int w = 0; w < jobs; ++w) pool.emplace_back(worker);
    for (std::thread& th : pool) th.join();
  }

  ExperimentResult out;
  std::ostringstream csv, timing;
  csv << "# network_throughput: bits/s averaged over the num_slots window "
         "(objective / K); lp_bound: bits/s summed over the window\n";
  csv << "sweep_key,sweep_value,method,child_seed,status,network_throughput,"
         "lp_bound,gap,mean_interruption_slots,iterations\n";
  timing << "sweep_key,sweep_value,method,child_seed,wall_time_s\n";
  for (const Cell& c : cells) {
    for (const MetricsRow& row : c.rows) {
      out.rows.push_back(row);
      csv << config.sweep_key << ',' << fmt(row.sweep_value) << ',' << row.method << ','
          << row.child_seed << ',' << row.status << ',' << fmt(row.network_throughput)
          << ',' << fmt(row.lp_bound) << ',' << fmt(row.gap) << ','
          << fmt(row.mean_interruption_slots) << ',' << row.iterations << '\n';
      timing << config.sweep_key << ',' << fmt(row.sweep_value) << ',' << row.method
             << ',' << row.child_seed << ',' << fmt(row.wall_time_s) << '\n';
    }
  }
  out.csv = csv.str();
  out.timing_csv = timing.str();
  return out;
}

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  for (char ch : line) {
    if (ch == ',') {
      out.push_back(cur);
      cur.clear();
    } else {
      cur.push_back(ch);
    }
  }
  out.push_back(cur);
  return out;
}

double parse_num(const std::string& s, int lineno, const char* what) {
  try {
    std::size_t used = 0;
    double v = std::stod(s, &used);
    if (used != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw std::runtime_error("line " + std::to_string(lineno) + ": bad " + what +
                             " \"" + s + "\"");
  }
}

struct Agg {
  std::string key;
  double value = 0;
  std::string method;
  std::vector<double> tp, intr;
};

void mean_ci(const std::vector<double>& v, double* mean, double* ci) {
  double s = 0;
  for (double x : v) s += x;
  *mean = s / v.size();
  if (v.size() < 2) {
    *ci = 0;
    return;
  }
  double ss = 0;
  for (double x : v) ss += (x - *mean) * (x - *mean);
  double sd = std::sqrt(ss / (v.size() - 1));
  *ci = 1.96 * sd / std::sqrt(static_cast<double>(v.size()));
}

}  // namespace

std::string emit_plot_data(const std::string& csv) {
  std::istringstream in(csv);
  std::string line;
  int lineno = 0;
  bool have_header = false;
  std::vector<Agg> groups;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line[0] == '#') continue;
    std::vector<std::string> f = split_csv_line(line);
    if (!have_header) {
      if (f.size() != 10 || f[0] != "sweep_key" || f[5] != "network_throughput")
        throw std::runtime_error("line " + std::to_string(lineno) +
                                 ": unexpected CSV header");
      have_header = true;
      continue;
    }
    if (f.size() != 10)
      throw std::runtime_error("line " + std::to_string(lineno) + ": expected 10 fields, got " +
                               std::to_string(f.size()));
    if (f[4] != "ok") continue;  // failed cells carry no metrics
    double value = parse_num(f[1], lineno, "sweep_value");
    double tp = parse_num(f[5], lineno, "network_throughput");
    double intr = parse_num(f[8], lineno, "mean_interruption_slots");
    Agg* g = nullptr;
    for (Agg& a : groups) {
      if (a.value == value && a.method == f[2]) {
        g = &a;
        break;
      }
    }
    if (!g) {
      groups.push_back(Agg{f[0], value, f[2], {}, {}});
      g = &groups.back();
    }
    g->tp.push_back(tp);
    g->intr.push_back(intr);
  }
  if (!have_header) throw std::runtime_error("line 1: missing CSV header");

  std::ostringstream out;
  out << "sweep_key,sweep_value,method,n,throughput_mean,throughput_ci95,"
         "interruption_mean,interruption_ci95\n";
  std::stable_sort(groups.begin(), groups.end(), [](const Agg& a, const Agg& b) {
    return a.value < b.value;
  });
  for (const Agg& g : groups) {
    double tm, tc, im, ic;
    mean_ci(g.tp, &tm, &tc);
    mean_ci(g.intr, &im, &ic);
    out << g.key << ',' << fmt(g.value) << ',' << g.method << ',' << g.tp.size() << ','
        << fmt(tm) << ',' << fmt(tc) << ',' << fmt(im) << ',' << fmt(ic) << '\n';
  }
  return out.str();
}

}  // namespace mmsched
