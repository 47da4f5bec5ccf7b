#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>
#include <set>
#include <sstream>

#include "doctest.h"
#include "mmsched/experiment.hpp"
#include "mmsched/pricing.hpp"

using namespace mmsched;

namespace {

ExperimentConfig tiny_config() {
  ExperimentConfig cfg;
  cfg.scenario.num_maps = 2;
  cfg.scenario.num_ues = 2;
  cfg.scenario.num_slots = 4;
  cfg.scenario.area_side_m = 150.0;
  cfg.scenario.blockage_inv_rate_ms = 120.0;
  cfg.scenario.blockage_min_ms = 60.0;
  cfg.scenario.blockage_max_ms = 160.0;
  cfg.timing = TimingParams{1, 1, 2};
  cfg.sweep_key = "num_maps";
  cfg.sweep_values = {1, 2};
  cfg.replications = 2;
  cfg.methods = {"sc", "mc_nocomp", "mc_comp", "bound"};
  cfg.master_seed = 7;
  return cfg;
}

int data_lines(const std::string& csv) {
  std::istringstream in(csv);
  std::string line;
  int n = 0;
  bool header = false;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    if (!header) {
      header = true;
      continue;
    }
    ++n;
  }
  return n;
}

}  // namespace

TEST_CASE("config validation") {
  ExperimentConfig cfg = tiny_config();
  CHECK_NOTHROW(cfg.validate());

  SUBCASE("bad sweep key") {
    cfg.sweep_key = "num_ues";
    CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
  }
  SUBCASE("empty sweep") {
    cfg.sweep_values.clear();
    CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
  }
  SUBCASE("fractional map count") {
    cfg.sweep_values = {1.5};
    CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
  }
  SUBCASE("fractional blockage rate is fine") {
    cfg.sweep_key = "blockage_inv_rate_ms";
    cfg.sweep_values = {250.5};
    CHECK_NOTHROW(cfg.validate());
  }
  SUBCASE("zero replications") {
    cfg.replications = 0;
    CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
  }
  SUBCASE("unknown method") {
    cfg.methods = {"mc_comp", "genie"};
    CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
  }
  SUBCASE("duplicate method") {
    cfg.methods = {"sc", "sc"};
    CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
  }
  SUBCASE("bad solver") {
    cfg.solver.ip_rel_gap = -1;
    CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
  }
}

TEST_CASE("config json round trip and strictness") {
  const char* text = R"({
    "scenario": {"num_maps": 3, "num_ues": 4, "num_slots": 6, "blockage_inv_rate_ms": 300},
    "radio": {"p_tot_dbm": 28.0},
    "timing": {"t_ha": 1, "t_ch": 1},
    "solver": {"ip_rel_gap": 0.001, "columns_per_slot": 2},
    "sweep": {"key": "blockage_inv_rate_ms", "values": [100, 250]},
    "replications": 3,
    "methods": ["mc_comp", "sc"],
    "output_dir": "out",
    "master_seed": 42
  })";
  ExperimentConfig cfg = config_from_json(text);
  CHECK(cfg.scenario.num_maps == 3);
  CHECK(cfg.scenario.num_ues == 4);
  CHECK(cfg.scenario.blockage_inv_rate_ms == 300.0);
  CHECK(cfg.radio.p_tot_dbm == 28.0);
  CHECK(cfg.timing.t_ha == 1);
  CHECK(cfg.timing.t_s == 2);  // recomputed from t_ha + t_ch
  CHECK(cfg.solver.ip_rel_gap == 0.001);
  CHECK(cfg.solver.columns_per_slot == 2);
  CHECK(cfg.sweep_key == "blockage_inv_rate_ms");
  CHECK(cfg.sweep_values == std::vector<double>{100, 250});
  CHECK(cfg.replications == 3);
  CHECK(cfg.methods == std::vector<std::string>{"mc_comp", "sc"});
  CHECK(cfg.output_dir == "out");
  CHECK(cfg.master_seed == 42);

  CHECK_THROWS_WITH_AS(config_from_json(R"({"swep": {}})"),
                       doctest::Contains("unknown key"), std::invalid_argument);
  CHECK_THROWS_WITH_AS(config_from_json(R"({"scenario": {"num_map": 3}})"),
                       doctest::Contains("unknown key"), std::invalid_argument);
  // the per-cell seed always comes from master_seed, never from the scenario
  CHECK_THROWS_AS(config_from_json(R"({"scenario": {"rng_seed": 5}})"),
                  std::invalid_argument);
  CHECK_THROWS_AS(config_from_json(R"({"methods": []})"), std::invalid_argument);
  CHECK_THROWS_AS(config_from_json("not json"), std::exception);
}

TEST_CASE("cell seeds are stable and distinct") {
  CHECK(cell_seed(1, 0) == cell_seed(1, 0));
  std::set<std::uint64_t> seen;
  for (int rep = 0; rep < 200; ++rep) seen.insert(cell_seed(99, rep));
  CHECK(seen.size() == 200u);
  CHECK(cell_seed(1, 0) != cell_seed(2, 0));
}

TEST_CASE("power_links_to_dbm inverts the cap mapping") {
  RadioParams radio;
  for (int n = 1; n <= 8; ++n) {
    radio.p_tot_dbm = power_links_to_dbm(radio.p_a_dbm, n);
    CHECK(power_cap_links(radio) == n);
    double back = std::pow(10.0, (radio.p_tot_dbm - radio.p_a_dbm) / 10.0);
    CHECK(static_cast<int>(std::lround(back)) == n);
  }
}

TEST_CASE("run_experiment: grid shape, dominance, replay") {
  ExperimentConfig cfg = tiny_config();
  ExperimentResult res = run_experiment(cfg);

  const int cells = 2 * 2;
  REQUIRE(static_cast<int>(res.rows.size()) == cells * 4);
  CHECK(data_lines(res.csv) == cells * 4);
  CHECK(data_lines(res.timing_csv) == cells * 4);

  for (int c = 0; c < cells; ++c) {
    const MetricsRow* sc = &res.rows[c * 4 + 0];
    const MetricsRow* nocomp = &res.rows[c * 4 + 1];
    const MetricsRow* comp = &res.rows[c * 4 + 2];
    const MetricsRow* bound = &res.rows[c * 4 + 3];
    CHECK(sc->method == "sc");
    CHECK(nocomp->method == "mc_nocomp");
    CHECK(comp->method == "mc_comp");
    CHECK(bound->method == "bound");
    REQUIRE(sc->status == "ok");
    REQUIRE(nocomp->status == "ok");
    REQUIRE(comp->status == "ok");
    REQUIRE(bound->status == "ok");
    // identical realization per cell: same child seed for all methods
    CHECK(sc->child_seed == comp->child_seed);
    double tol = 1e-6 * (1.0 + bound->network_throughput);
    CHECK(sc->network_throughput <= nocomp->network_throughput + tol);
    CHECK(nocomp->network_throughput <= comp->network_throughput + tol);
    CHECK(comp->network_throughput <= bound->network_throughput + tol);
    CHECK(comp->gap >= -1e-12);
  }

  SUBCASE("rows replay from the recorded child seed") {
    const MetricsRow& row = res.rows[2 * 4 + 2];  // sweep value 2, rep 0, mc_comp
    CHECK(row.sweep_value == 2.0);
    ScenarioParams sp = cfg.scenario;
    sp.num_maps = 2;
    sp.rng_seed = row.child_seed;
    Scenario s = generate(sp, cfg.radio);
    ColgenOptions co;
    co.ip.rel_gap = cfg.solver.ip_rel_gap;
    co.ip.node_limit = cfg.solver.ip_node_limit;
    co.columns_per_slot = cfg.solver.columns_per_slot;
    co.max_iters = cfg.solver.max_colgen_iters;
    SolveResult replay = run_mc_comp(s, cfg.radio, cfg.timing, co);
    CHECK(replay.objective / sp.num_slots == doctest::Approx(row.network_throughput));
  }

  SUBCASE("deterministic CSV bytes") {
    ExperimentResult again = run_experiment(cfg);
    CHECK(again.csv == res.csv);
  }

  SUBCASE("jobs > 1 preserves output order and bytes") {
    ExperimentResult par = run_experiment(cfg, 3);
    CHECK(par.csv == res.csv);
  }
}

TEST_CASE("run_experiment applies the sweep parameter") {
  ExperimentConfig cfg = tiny_config();
  cfg.methods = {"sc"};
  cfg.replications = 1;
  cfg.sweep_key = "blockage_inv_rate_ms";
  cfg.sweep_values = {40, 5000};
  ExperimentResult res = run_experiment(cfg);
  REQUIRE(res.rows.size() == 2);
  // rare blockage must not yield less throughput than near-constant blockage
  CHECK(res.rows[0].network_throughput <= res.rows[1].network_throughput + 1e-6);
}

TEST_CASE("emit_plot_data aggregates") {
  std::string csv =
      "# comment\n"
      "sweep_key,sweep_value,method,child_seed,status,network_throughput,"
      "lp_bound,gap,mean_interruption_slots,iterations\n"
      "num_maps,1,sc,11,ok,10,0,0,2,3\n"
      "num_maps,1,sc,12,ok,14,0,0,4,3\n"
      "num_maps,2,sc,13,ok,20,0,0,1,3\n"
      "num_maps,1,mc_comp,11,IterLimit,0,0,0,0,0\n";
  std::string out = emit_plot_data(csv);
  std::istringstream in(out);
  std::string header, l1, l2;
  std::getline(in, header);
  std::getline(in, l1);
  std::getline(in, l2);
  CHECK(header ==
        "sweep_key,sweep_value,method,n,throughput_mean,throughput_ci95,"
        "interruption_mean,interruption_ci95");
  // mean 12, sd 2*sqrt(2) -> ci 1.96*2 = 3.92; interruption mean 3, ci 1.96
  CHECK(l1 == "num_maps,1,sc,2,12,3.92,3,1.96");
  CHECK(l2 == "num_maps,2,sc,1,20,0,1,0");
  CHECK(in.eof() == false);  // trailing newline only
}

TEST_CASE("emit_plot_data rejects malformed input with line numbers") {
  std::string head =
      "sweep_key,sweep_value,method,child_seed,status,network_throughput,"
      "lp_bound,gap,mean_interruption_slots,iterations\n";
  CHECK_THROWS_WITH_AS(emit_plot_data("bad,header\n"),
                       doctest::Contains("line 1"), std::runtime_error);
  CHECK_THROWS_WITH_AS(emit_plot_data(head + "num_maps,1,sc,1,ok,10\n"),
                       doctest::Contains("line 2"), std::runtime_error);
  CHECK_THROWS_WITH_AS(emit_plot_data(head + "num_maps,x,sc,1,ok,1,0,0,0,0\n"),
                       doctest::Contains("bad sweep_value"), std::runtime_error);
  CHECK_THROWS_AS(emit_plot_data(""), std::runtime_error);
}

TEST_CASE("experiment csv feeds emit_plot_data") {
  ExperimentConfig cfg = tiny_config();
  cfg.methods = {"sc"};
  ExperimentResult res = run_experiment(cfg);
  std::string plot = emit_plot_data(res.csv);
  CHECK(data_lines(plot) == 2);  // one aggregate per sweep value
}
