#include "mmsched/channel.hpp"

#include <cmath>
#include <stdexcept>

namespace mmsched {

void RadioParams::validate() const {
  if (p_a_dbm > p_tot_dbm || p_h_dbm > p_tot_dbm)
    throw std::invalid_argument("RadioParams: per-link power exceeds budget");
  if (bandwidth_hz <= 0) throw std::invalid_argument("RadioParams: bandwidth_hz <= 0");
  if (f_c_ghz < 0.5 || f_c_ghz > 100.0)
    throw std::invalid_argument("RadioParams: f_c_ghz outside [0.5, 100]");
  if (enum_radius_m <= 0) throw std::invalid_argument("RadioParams: enum_radius_m <= 0");
  if (h_bs_m <= h_ut_m) throw std::invalid_argument("RadioParams: h_bs_m <= h_ut_m");
}

double dbm_to_mw(double dbm) { return std::pow(10.0, dbm / 10.0); }

double path_loss_umi_los_db(double d2d_m, const RadioParams& radio) {
  constexpr double kC = 299792458.0;
  double d2d = d2d_m < 1.0 ? 1.0 : d2d_m;
  double dh = radio.h_bs_m - radio.h_ut_m;
  double d3d = std::sqrt(d2d * d2d + dh * dh);
  double fc_ghz = radio.f_c_ghz;
  // break-point distance with the standard 1 m effective-height correction
  double d_bp = 4.0 * (radio.h_bs_m - 1.0) * (radio.h_ut_m - 1.0) * (fc_ghz * 1e9) / kC;
  if (d2d <= d_bp) {
    return 32.4 + 21.0 * std::log10(d3d) + 20.0 * std::log10(fc_ghz);
  }
  return 32.4 + 40.0 * std::log10(d3d) + 20.0 * std::log10(fc_ghz) -
         9.5 * std::log10(d_bp * d_bp + dh * dh);
}

double link_snr(const RadioParams& radio, double d2d_m) {
  double snr_db = radio.p_a_dbm + radio.g_a_dbi + radio.g_u_dbi -
                  path_loss_umi_los_db(d2d_m, radio) - radio.p_n_dbm;
  return std::pow(10.0, snr_db / 10.0);
}

double comp_rate_bps(double bandwidth_hz, const std::vector<double>& snrs) {
  double sum = 0.0;
  for (double s : snrs) sum += s;
  if (sum <= 0.0) return 0.0;
  return bandwidth_hz * std::log2(1.0 + sum);
}

}  // namespace mmsched
