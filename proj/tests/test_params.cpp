#include "doctest.h"
#include "support.hpp"

#include "cmm/error.hpp"

using namespace cmm;
using cmm::test::angular;

TEST_CASE("thermal occupancy matches the mpmath value") {
  // mpmath, 30 digits: 1 / (exp(hbar 2pi 10 MHz / (k_B 10 mK)) - 1)
  CHECK(thermal_occupancy(angular(10e6), 0.01) == doctest::Approx(20.340618351800997).epsilon(1e-14));
  CHECK(thermal_occupancy(angular(10e6), 0.0) == 0.0);
  CHECK(thermal_occupancy(angular(10e9), 0.01) < 1e-20);
}

TEST_CASE("occupancy grows with temperature") {
  double prev = 0.0;
  for (double T = 0.001; T < 0.3; T += 0.01) {
    const double n = thermal_occupancy(angular(10e6), T);
    CHECK(n > prev);
    prev = n;
  }
}

TEST_CASE("drive amplitude matches the mpmath value") {
  // sqrt(2 kappa_e P / (hbar omega_0)) for 10 mW, 10 GHz, 2.8 MHz
  CHECK(drive_amplitude(0.01, angular(10e9), angular(2.8e6)) ==
        doctest::Approx(2.3043897409586232e14).epsilon(1e-14));
  CHECK(drive_amplitude(0.0, angular(10e9), angular(2.8e6)) == 0.0);
}

TEST_CASE("baseline parameters validate cleanly") {
  const auto p = test::baseline();
  CHECK_FALSE(has_errors(validate(p)));
  CHECK_NOTHROW(require_valid(p));
  CHECK(p.kappa_a() == doctest::Approx(angular(3e6)));
  CHECK(p.chi() == 0.0);
}

TEST_CASE("invalid parameters are rejected") {
  auto p = test::baseline();
  p.kappa_m = -1.0;
  CHECK(has_errors(validate(p)));
  CHECK_THROWS_AS(require_valid(p), ConfigError);

  p = test::baseline();
  p.temperature = -0.1;
  CHECK_THROWS_AS(require_valid(p), ConfigError);

  p = test::baseline();
  p.omega_b = 0.0;
  CHECK_THROWS_AS(require_valid(p), ConfigError);
}

TEST_CASE("enum names") {
  CHECK(to_string(DrivePort::CW) == "cw");
  CHECK(to_string(DrivePort::CCW) == "ccw");
  CHECK(to_string(Variant::Ideal) == "ideal");
  CHECK(to_string(Variant::Imperfect) == "imperfect");
  CHECK(to_string(DetuningMode::Effective) == "effective");
  CHECK(to_string(DetuningMode::Physical) == "physical");
}
