#include "mmsched/scenario.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "json.hpp"
#include "mmsched/rng.hpp"

namespace mmsched {

namespace {
constexpr std::uint64_t kTagMaps = 1;
constexpr std::uint64_t kTagUes = 2;
constexpr std::uint64_t kTagBlockage = 3;
}  // namespace

void ScenarioParams::validate() const {
  if (area_side_m <= 0) throw std::invalid_argument("ScenarioParams: area_side_m <= 0");
  if (num_maps < 1 || num_ues < 1 || num_slots < 1)
    throw std::invalid_argument("ScenarioParams: counts must be >= 1");
  if (slot_duration_ms <= 0)
    throw std::invalid_argument("ScenarioParams: slot_duration_ms <= 0");
  if (ue_speed_kmh < 0) throw std::invalid_argument("ScenarioParams: negative speed");
  if (!(blockage_inv_rate_ms > 0))
    throw std::invalid_argument("ScenarioParams: blockage_inv_rate_ms <= 0");
  if (blockage_min_ms > blockage_max_ms || blockage_min_ms < 0)
    throw std::invalid_argument("ScenarioParams: bad blockage duration range");
}

std::size_t Scenario::idx(int i, int j, int k) const {
  if (i < 0 || i >= params.num_maps || j < 0 || j >= params.num_ues || k < 0 ||
      k >= params.num_slots)
    throw std::out_of_range("Scenario index out of range");
  return (static_cast<std::size_t>(i) * params.num_ues + j) * params.num_slots + k;
}

std::vector<BlockedInterval> sample_blockage(double inv_rate_ms, double dur_min_ms,
                                             double dur_max_ms, double horizon_ms,
                                             std::mt19937_64& rng) {
  std::vector<BlockedInterval> out;
  if (!std::isfinite(inv_rate_ms)) return out;
  // alternating renewal: LOS gap from the end of the previous interruption
  double t = 0.0;
  for (;;) {
    t += exp_sample(rng, inv_rate_ms);
    if (t >= horizon_ms) break;
    double dur = uniform_range(rng, dur_min_ms, dur_max_ms);
    double end = std::min(t + dur, horizon_ms);
    out.push_back({t, end});
    t = end;
    if (t >= horizon_ms) break;
  }
  return out;
}

std::vector<char> quantize_blockage(const std::vector<BlockedInterval>& intervals,
                                    int num_slots, double slot_ms) {
  std::vector<char> blocked(num_slots, 0);
  for (const auto& iv : intervals) {
    int first = std::max(0, static_cast<int>(std::floor(iv.start_ms / slot_ms)));
    for (int k = first; k < num_slots; ++k) {
      double s = k * slot_ms;
      if (s >= iv.end_ms) break;
      if (s + slot_ms > iv.start_ms) blocked[k] = 1;
    }
  }
  return blocked;
}

Scenario generate(const ScenarioParams& params, const RadioParams& radio) {
  params.validate();
  radio.validate();
  const int m = params.num_maps, u = params.num_ues, kslots = params.num_slots;

  Scenario s;
  s.params = params;
  s.map_positions.resize(m);
  {
    std::mt19937_64 rng(derive_seed(params.rng_seed, kTagMaps));
    for (int i = 0; i < m; ++i) {
      s.map_positions[i] = {uniform_range(rng, 0, params.area_side_m),
                            uniform_range(rng, 0, params.area_side_m), radio.h_bs_m};
    }
  }

  const double speed_m_per_ms = params.ue_speed_kmh / 3600.0;  // km/h -> m/ms
  const double step = speed_m_per_ms * params.slot_duration_ms;
  s.ue_positions.assign(u, std::vector<Point3>(kslots));
  {
    std::mt19937_64 rng(derive_seed(params.rng_seed, kTagUes));
    for (int j = 0; j < u; ++j) {
      double x0 = uniform_range(rng, 0, params.area_side_m);
      double y0 = uniform_range(rng, 0, params.area_side_m);
      double theta = uniform_range(rng, 0, 2.0 * M_PI);
      double dx = std::cos(theta), dy = std::sin(theta);
      for (int k = 0; k < kslots; ++k) {
        s.ue_positions[j][k] = {x0 + step * k * dx, y0 + step * k * dy, radio.h_ut_m};
      }
    }
  }

  const std::size_t total = static_cast<std::size_t>(m) * u * kslots;
  s.los.assign(total, 1);
  s.dist2d.resize(total);
  s.dist3d.resize(total);
  s.snr.resize(total);
  const double horizon = kslots * params.slot_duration_ms;
  const double dh = radio.h_bs_m - radio.h_ut_m;
  for (int i = 0; i < m; ++i) {
    for (int j = 0; j < u; ++j) {
      std::mt19937_64 rng(derive_seed(params.rng_seed, kTagBlockage,
                                      static_cast<std::uint64_t>(i) * u + j));
      auto intervals = sample_blockage(params.blockage_inv_rate_ms, params.blockage_min_ms,
                                       params.blockage_max_ms, horizon, rng);
      auto blocked = quantize_blockage(intervals, kslots, params.slot_duration_ms);
      for (int k = 0; k < kslots; ++k) {
        std::size_t p = (static_cast<std::size_t>(i) * u + j) * kslots + k;
        double ddx = s.map_positions[i].x - s.ue_positions[j][k].x;
        double ddy = s.map_positions[i].y - s.ue_positions[j][k].y;
        double d2 = std::sqrt(ddx * ddx + ddy * ddy);
        s.dist2d[p] = d2;
        s.dist3d[p] = std::sqrt(d2 * d2 + dh * dh);
        s.snr[p] = link_snr(radio, d2);
        s.los[p] = blocked[k] ? 0 : 1;
      }
    }
  }
  return s;
}

std::string scenario_to_json(const Scenario& s) {
  nlohmann::json j;
  j["version"] = 1;
  const auto& p = s.params;
  j["params"] = {{"area_side_m", p.area_side_m},
                 {"num_maps", p.num_maps},
                 {"num_ues", p.num_ues},
                 {"num_slots", p.num_slots},
                 {"slot_duration_ms", p.slot_duration_ms},
                 {"ue_speed_kmh", p.ue_speed_kmh},
                 {"blockage_inv_rate_ms",
                  std::isfinite(p.blockage_inv_rate_ms) ? nlohmann::json(p.blockage_inv_rate_ms)
                                                        : nlohmann::json("inf")},
                 {"blockage_min_ms", p.blockage_min_ms},
                 {"blockage_max_ms", p.blockage_max_ms},
                 {"rng_seed", p.rng_seed}};
  auto pts = nlohmann::json::array();
  for (const auto& pt : s.map_positions) pts.push_back({pt.x, pt.y, pt.z});
  j["map_positions"] = std::move(pts);
  auto traj = nlohmann::json::array();
  for (const auto& row : s.ue_positions) {
    auto r = nlohmann::json::array();
    for (const auto& pt : row) r.push_back({pt.x, pt.y, pt.z});
    traj.push_back(std::move(r));
  }
  j["ue_positions"] = std::move(traj);
  j["los"] = std::vector<int>(s.los.begin(), s.los.end());
  return j.dump();
}

Scenario scenario_from_json(const std::string& text, const RadioParams& radio) {
  auto j = nlohmann::json::parse(text);
  if (j.at("version").get<int>() != 1)
    throw std::invalid_argument("scenario_from_json: unsupported version");
  ScenarioParams p;
  const auto& jp = j.at("params");
  p.area_side_m = jp.at("area_side_m").get<double>();
  p.num_maps = jp.at("num_maps").get<int>();
  p.num_ues = jp.at("num_ues").get<int>();
  p.num_slots = jp.at("num_slots").get<int>();
  p.slot_duration_ms = jp.at("slot_duration_ms").get<double>();
  p.ue_speed_kmh = jp.at("ue_speed_kmh").get<double>();
  if (jp.at("blockage_inv_rate_ms").is_string()) {
    p.blockage_inv_rate_ms = std::numeric_limits<double>::infinity();
  } else {
    p.blockage_inv_rate_ms = jp.at("blockage_inv_rate_ms").get<double>();
  }
  p.blockage_min_ms = jp.at("blockage_min_ms").get<double>();
  p.blockage_max_ms = jp.at("blockage_max_ms").get<double>();
  p.rng_seed = jp.at("rng_seed").get<std::uint64_t>();

  // regenerate deterministically, then overlay the recorded artifacts so a
  // replay matches the file even if it was hand-edited
  Scenario s = generate(p, radio);
  const auto& maps = j.at("map_positions");
  for (int i = 0; i < p.num_maps; ++i) {
    s.map_positions[i] = {maps[i][0].get<double>(), maps[i][1].get<double>(),
                          maps[i][2].get<double>()};
  }
  const auto& traj = j.at("ue_positions");
  for (int q = 0; q < p.num_ues; ++q) {
    for (int k = 0; k < p.num_slots; ++k) {
      s.ue_positions[q][k] = {traj[q][k][0].get<double>(), traj[q][k][1].get<double>(),
                              traj[q][k][2].get<double>()};
    }
  }
  const auto& los = j.at("los");
  const double dh = radio.h_bs_m - radio.h_ut_m;
  for (int i = 0; i < p.num_maps; ++i) {
    for (int q = 0; q < p.num_ues; ++q) {
      for (int k = 0; k < p.num_slots; ++k) {
        std::size_t pos = s.idx(i, q, k);
        s.los[pos] = los[pos].get<int>() ? 1 : 0;
        double ddx = s.map_positions[i].x - s.ue_positions[q][k].x;
        double ddy = s.map_positions[i].y - s.ue_positions[q][k].y;
        double d2 = std::sqrt(ddx * ddx + ddy * ddy);
        s.dist2d[pos] = d2;
        s.dist3d[pos] = std::sqrt(d2 * d2 + dh * dh);
        s.snr[pos] = link_snr(radio, d2);
      }
    }
  }
  return s;
}

}  // namespace mmsched
