#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>

#include "doctest.h"
#include "mmsched/channel.hpp"

using namespace mmsched;

TEST_CASE("umi-los path loss at 10 m matches hand evaluation") {
  RadioParams radio;
  double d3d = std::sqrt(10.0 * 10.0 + 8.5 * 8.5);
  CHECK(d3d == doctest::Approx(13.124).epsilon(1e-3));
  double expected = 32.4 + 21.0 * std::log10(d3d) + 20.0 * std::log10(30.0);
  CHECK(path_loss_umi_los_db(10.0, radio) == doctest::Approx(expected).epsilon(1e-12));
  CHECK(path_loss_umi_los_db(10.0, radio) == doctest::Approx(85.4).epsilon(2e-3));
}

TEST_CASE("path loss branches agree at the break-point distance") {
  RadioParams radio;
  double d_bp = 4.0 * (radio.h_bs_m - 1.0) * (radio.h_ut_m - 1.0) *
                (radio.f_c_ghz * 1e9) / 299792458.0;
  CHECK(d_bp > 1500.0);  // far beyond the 250 m area at Table I values
  double below = path_loss_umi_los_db(d_bp * (1.0 - 1e-9), radio);
  double above = path_loss_umi_los_db(d_bp * (1.0 + 1e-9), radio);
  CHECK(std::abs(below - above) < 0.5);
}

TEST_CASE("path loss clamps tiny distances and is monotone in d2d") {
  RadioParams radio;
  double at0 = path_loss_umi_los_db(0.0, radio);
  CHECK(std::isfinite(at0));
  CHECK(at0 == path_loss_umi_los_db(0.5, radio));
  CHECK(at0 == path_loss_umi_los_db(1.0, radio));
  double prev = at0;
  for (double d = 2.0; d < 3000.0; d *= 1.37) {
    double pl = path_loss_umi_los_db(d, radio);
    CHECK(pl >= prev - 1e-12);
    prev = pl;
  }
}

TEST_CASE("link snr follows the dB budget") {
  RadioParams radio;
  double pl = path_loss_umi_los_db(10.0, radio);
  double snr_db = 24.0 + 15.0 + 10.0 - pl + 85.0;
  CHECK(snr_db == doctest::Approx(48.6).epsilon(1e-3));
  CHECK(link_snr(radio, 10.0) == doctest::Approx(std::pow(10.0, snr_db / 10.0)).epsilon(1e-12));
  CHECK(link_snr(radio, 10.0) == doctest::Approx(7.24e4).epsilon(5e-3));

  // a budget summing to 0 dB gives unit linear SNR
  RadioParams zero = radio;
  zero.p_a_dbm = pl - 15.0 - 10.0 - 85.0;
  zero.p_tot_dbm = zero.p_a_dbm + 10.0;
  CHECK(link_snr(zero, 10.0) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("comp rate evaluates eq-5 sums") {
  CHECK(comp_rate_bps(1e9, {}) == 0.0);
  CHECK(comp_rate_bps(1e9, {1.0}) == doctest::Approx(1e9).epsilon(1e-12));
  CHECK(comp_rate_bps(1e9, {1.0, 3.0}) == doctest::Approx(1e9 * std::log2(5.0)).epsilon(1e-12));
  CHECK(comp_rate_bps(1e9, {1.0, 3.0}) == doctest::Approx(2.3219e9).epsilon(1e-4));
}

TEST_CASE("comp rate is superadditive in links but subadditive in rate") {
  for (double a : {0.3, 2.0, 50.0, 7.0e4}) {
    for (double b : {0.1, 1.0, 900.0}) {
      double ra = comp_rate_bps(1e9, {a});
      double rb = comp_rate_bps(1e9, {b});
      double rab = comp_rate_bps(1e9, {a, b});
      CHECK(rab > ra);
      CHECK(rab > rb);
      CHECK(rab < ra + rb);
    }
  }
}

TEST_CASE("dbm conversion and parameter validation") {
  CHECK(dbm_to_mw(0.0) == doctest::Approx(1.0));
  CHECK(dbm_to_mw(30.0) == doctest::Approx(1000.0));
  CHECK(dbm_to_mw(24.0) == doctest::Approx(251.1886).epsilon(1e-6));

  RadioParams bad;
  bad.p_a_dbm = 40.0;
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
  bad = RadioParams{};
  bad.f_c_ghz = 0.1;
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
  RadioParams ok;
  CHECK_NOTHROW(ok.validate());
}
