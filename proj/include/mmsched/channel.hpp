#pragma once

#include <vector>

namespace mmsched {

/// Radio-link budget and geometry constants. Defaults follow the usual
/// mm-wave small-cell setup at 30 GHz with a 1 GHz carrier bandwidth.
struct RadioParams {
  double p_tot_dbm = 30.0;  // per-mmAP power budget
  double p_a_dbm = 24.0;    // power drawn by one active link
  double p_h_dbm = 24.0;    // power drawn by one hot stand-by link
  double g_a_dbi = 15.0;    // mmAP beamforming gain
  double g_u_dbi = 10.0;    // UE beamforming gain
  double h_bs_m = 10.0;
  double h_ut_m = 1.5;
  double f_c_ghz = 30.0;
  double p_n_dbm = -85.0;   // noise power
  double bandwidth_hz = 1e9;
  double enum_radius_m = 360.0;  // candidate-set distance cutoff

  void validate() const;  // throws std::invalid_argument
};

double dbm_to_mw(double dbm);

/// UMi street-canyon LOS path loss (two-segment, no shadowing).
/// d_2d below 1 m is clamped to 1 m.
double path_loss_umi_los_db(double d2d_m, const RadioParams& radio);

/// Linear SNR of a single link at 2-D distance d2d_m:
/// SNR_dB = P_a + G_a + G_u - PL - P_N.
double link_snr(const RadioParams& radio, double d2d_m);

/// Joint-transmission throughput: B * log2(1 + sum of linear SNRs).
/// An empty list yields 0.
double comp_rate_bps(double bandwidth_hz, const std::vector<double>& snrs);

}  // namespace mmsched
