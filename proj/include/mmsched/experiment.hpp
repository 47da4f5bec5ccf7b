#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "mmsched/baselines.hpp"

namespace mmsched {

/// Knobs forwarded to the per-method solvers. The defaults trade a bounded,
/// deterministic amount of optimality (rel_gap on the integer master) for the
/// solve times sweeps need.
struct SolverConfig {
  double ip_rel_gap = 1e-4;
  long ip_node_limit = 2000000;
  int columns_per_slot = 1;
  int max_colgen_iters = 500;
};

/// One sweep x replication grid: the sweep rewrites a single knob of the base
/// setup, every requested method runs on the identical scenario realization.
struct ExperimentConfig {
  ScenarioParams scenario;
  RadioParams radio;
  TimingParams timing;
  SolverConfig solver;
  std::string sweep_key = "num_maps";  // num_maps | power_links | blockage_inv_rate_ms
  std::vector<double> sweep_values{1};
  int replications = 1;
  std::vector<std::string> methods{"mc_comp"};  // mc_comp | mc_nocomp | sc | bound
  std::string output_dir = ".";
  std::uint64_t master_seed = 1;

  void validate() const;  // throws std::invalid_argument
};

/// Strict JSON loader: unknown keys anywhere reject the whole config.
ExperimentConfig config_from_json(const std::string& text);

struct MetricsRow {
  double sweep_value = 0;
  std::string method;
  std::uint64_t child_seed = 0;
  std::string status;  // "ok" or a failure reason; failed cells keep zeros
  double network_throughput = 0;  // bits/s, objective averaged over the K slots
  double lp_bound = 0;            // bits/s summed over slots
  double gap = 0;
  double mean_interruption_slots = 0;
  int iterations = 0;
  double wall_time_s = 0;  // kept out of the deterministic CSV
};

struct ExperimentResult {
  std::vector<MetricsRow> rows;  // deterministic (sweep, replication, method) order
  std::string csv;         // byte-reproducible given (config, master_seed)
  std::string timing_csv;  // wall times; the only non-deterministic output
};

/// Child seed for one replication; deliberately shared across sweep values
/// (common random numbers), so paired sweeps compare the same realization.
/// Scenario streams are prefix-stable in num_maps, which makes per-method
/// throughput monotone in the sweep instance-wise, not just in the mean.
std::uint64_t cell_seed(std::uint64_t master_seed, int replication);

/// Active/hot link budget expressed as a per-mmAP dBm total: P_a + 10 log10(n).
double power_links_to_dbm(double p_a_dbm, int links);

ExperimentResult run_experiment(const ExperimentConfig& config, int jobs = 1);

/// Aggregates a run_experiment CSV into plot-ready rows: per (sweep value,
/// method) the mean and the 95% normal-approximation confidence half-width.
/// Throws std::runtime_error naming the offending line on malformed input.
std::string emit_plot_data(const std::string& csv);

}  // namespace mmsched
