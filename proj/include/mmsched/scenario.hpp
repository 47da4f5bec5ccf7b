#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "mmsched/channel.hpp"

namespace mmsched {

struct ScenarioParams {
  double area_side_m = 250.0;
  int num_maps = 5;
  int num_ues = 10;
  int num_slots = 20;
  double slot_duration_ms = 50.0;
  double ue_speed_kmh = 3.0;
  // mean interruption inter-arrival (lambda^-1); +inf disables blockage
  double blockage_inv_rate_ms = 250.0;
  double blockage_min_ms = 400.0;
  double blockage_max_ms = 1000.0;
  std::uint64_t rng_seed = 1;

  void validate() const;  // throws std::invalid_argument
};

struct Point3 {
  double x = 0, y = 0, z = 0;
};

struct BlockedInterval {
  double start_ms = 0;
  double end_ms = 0;
};

struct Scenario {
  ScenarioParams params;
  std::vector<Point3> map_positions;              // M
  std::vector<std::vector<Point3>> ue_positions;  // U x K
  // flattened M x U x K tensors, index = (i*U + j)*K + k
  std::vector<char> los;
  std::vector<double> dist2d;
  std::vector<double> dist3d;
  std::vector<double> snr;  // linear, precomputed for every (i,j,k)

  int num_maps() const { return params.num_maps; }
  int num_ues() const { return params.num_ues; }
  int num_slots() const { return params.num_slots; }

  std::size_t idx(int i, int j, int k) const;  // range-checked
  bool los_at(int i, int j, int k) const { return los[idx(i, j, k)] != 0; }
  double distance_at(int i, int j, int k) const { return dist3d[idx(i, j, k)]; }
  double distance2d_at(int i, int j, int k) const { return dist2d[idx(i, j, k)]; }
  double snr_at(int i, int j, int k) const { return snr[idx(i, j, k)]; }
};

/// Blocked intervals over [0, horizon_ms): arrival gaps ~ Exp(mean inv_rate_ms)
/// measured from the end of the previous interruption, durations
/// ~ U[dur_min_ms, dur_max_ms]. Intervals are disjoint and sorted.
std::vector<BlockedInterval> sample_blockage(double inv_rate_ms, double dur_min_ms,
                                             double dur_max_ms, double horizon_ms,
                                             std::mt19937_64& rng);

/// Marks slot k blocked iff [k*slot_ms, (k+1)*slot_ms) overlaps any interval.
std::vector<char> quantize_blockage(const std::vector<BlockedInterval>& intervals,
                                    int num_slots, double slot_ms);

/// Samples a full scenario. Pure function of (params, radio): positions and
/// per-link blockage streams are derived from params.rng_seed via splitmix64.
Scenario generate(const ScenarioParams& params, const RadioParams& radio);

std::string scenario_to_json(const Scenario& s);
Scenario scenario_from_json(const std::string& text, const RadioParams& radio);

}  // namespace mmsched
