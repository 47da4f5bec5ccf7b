#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "mmsched/experiment.hpp"

namespace {

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void spit(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << text;
}

// The schedule artifact stores states only, so the per-slot configurations are
// rebuilt from the A links with rates recomputed from the scenario SNRs.
std::vector<std::vector<mmsched::Configuration>> rebuild_columns(
    const mmsched::Schedule& sch, const mmsched::Scenario& scenario,
    const mmsched::RadioParams& radio, std::vector<int>* chosen) {
  std::vector<std::vector<mmsched::Configuration>> columns(sch.num_slots);
  chosen->assign(sch.num_slots, -1);
  for (int k = 0; k < sch.num_slots; ++k) {
    mmsched::Configuration cfg;
    cfg.slot = k;
    cfg.ue_rates.assign(sch.num_ues, 0.0);
    for (int j = 0; j < sch.num_ues; ++j) {
      std::vector<double> snrs;
      for (int i = 0; i < sch.num_maps; ++i) {
        if (sch.state_at(i, j, k) == 'A') {
          cfg.active_links.emplace_back(i, j);
          snrs.push_back(scenario.snr_at(i, j, k));
        }
      }
      cfg.ue_rates[j] = mmsched::comp_rate_bps(radio.bandwidth_hz, snrs);
    }
    std::sort(cfg.active_links.begin(), cfg.active_links.end());
    if (!cfg.active_links.empty()) (*chosen)[k] = 0;
    columns[k].push_back(std::move(cfg));
  }
  return columns;
}

int cmd_run(const std::string& config_path, bool seed_set, std::uint64_t seed,
            std::string out_dir, int jobs) {
  mmsched::ExperimentConfig cfg = mmsched::config_from_json(slurp(config_path));
  if (seed_set) cfg.master_seed = seed;
  if (out_dir.empty()) out_dir = cfg.output_dir;
  std::filesystem::create_directories(out_dir);
  mmsched::ExperimentResult res = mmsched::run_experiment(cfg, jobs);
  std::filesystem::path base(out_dir);
  spit((base / "metrics.csv").string(), res.csv);
  spit((base / "timing.csv").string(), res.timing_csv);
  spit((base / "plot.csv").string(), mmsched::emit_plot_data(res.csv));
  std::cout << (base / "metrics.csv").string() << '\n'
            << (base / "timing.csv").string() << '\n'
            << (base / "plot.csv").string() << '\n';
  return 0;
}

int cmd_validate(const std::string& schedule_path, const std::string& scenario_path,
                 bool sc_mode, const mmsched::TimingParams& timing,
                 const mmsched::RadioParams& radio) {
  mmsched::Schedule sch = mmsched::schedule_from_json(slurp(schedule_path));
  mmsched::Scenario scenario =
      mmsched::scenario_from_json(slurp(scenario_path), radio);
  std::vector<std::string> violations;
  if (sc_mode) {
    violations = mmsched::validate_sc(sch, scenario, timing, radio);
  } else {
    std::vector<int> chosen;
    auto columns = rebuild_columns(sch, scenario, radio, &chosen);
    mmsched::Schedule checked = sch;
    checked.chosen_config = chosen;
    violations = mmsched::validate_schedule(checked, scenario, timing, radio, columns);
  }
  for (const std::string& v : violations) std::cout << v << '\n';
  return violations.empty() ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"mm-wave multi-connectivity scheduling experiments"};
  app.require_subcommand(1);

  std::string config_path, out_dir;
  std::uint64_t seed = 0;
  int jobs = 1;
  auto* run = app.add_subcommand("run", "run a sweep experiment from a JSON config");
  run->add_option("--config", config_path, "experiment config (JSON)")->required();
  auto* seed_opt = run->add_option("--seed", seed, "override master_seed");
  run->add_option("--out", out_dir, "output directory (default: config output_dir)");
  run->add_option("--jobs", jobs, "parallel replication workers")->default_val(1);

  std::string schedule_path, scenario_path;
  bool sc_mode = false;
  mmsched::TimingParams timing;
  mmsched::RadioParams radio;
  auto* val = app.add_subcommand("validate", "check a schedule against a scenario");
  val->add_option("schedule", schedule_path, "schedule JSON")->required();
  val->add_option("scenario", scenario_path, "scenario JSON")->required();
  val->add_flag("--sc", sc_mode, "apply the single-connectivity rules");
  val->add_option("--t-ha", timing.t_ha, "H->A transition slots")->default_val(1);
  val->add_option("--t-ch", timing.t_ch, "C->H transition slots")->default_val(2);

  std::string csv_path;
  auto* plot = app.add_subcommand("plotdata", "aggregate a metrics CSV for plotting");
  plot->add_option("csv", csv_path, "metrics.csv from `run`")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (run->parsed()) return cmd_run(config_path, !seed_opt->empty(), seed, out_dir, jobs);
    if (val->parsed()) {
      timing.t_s = timing.t_ha + timing.t_ch;
      return cmd_validate(schedule_path, scenario_path, sc_mode, timing, radio);
    }
    std::cout << mmsched::emit_plot_data(slurp(csv_path));
    return 0;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
}
