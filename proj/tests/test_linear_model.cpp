#include "doctest.h"
#include "support.hpp"

#include "cmm/error.hpp"
#include "cmm/linear_model.hpp"
#include "cmm/output_mode.hpp"

using namespace cmm;
using cmm::test::angular;

TEST_CASE("ideal drift decouples the undriven cavity mode") {
  const auto s = test::magnon_optimal();
  const auto f = solve_steady_state(s.params, s.detunings, s.variant);
  const Matrix8 A = build_drift(s.params, s.detunings.delta_a, s.detunings.delta_m_eff, f.G_m,
                                Variant::Ideal);
  for (int i = 0; i < 8; ++i) {
    for (int j = 2; j < 4; ++j) {
      if (i == 2 || i == 3) continue;
      CHECK(A(i, j) == 0.0);
      CHECK(A(j, i) == 0.0);
    }
  }
  CHECK(A(2, 2) == -s.params.kappa_a());
  CHECK(A(2, 3) == s.detunings.delta_a);
  CHECK(A(6, 7) == s.params.omega_b);
  CHECK(A(6, 6) == 0.0);
  CHECK(A(7, 7) == -s.params.gamma_b);
  CHECK(A(4, 6) == doctest::Approx(f.G_m.imag()));
  CHECK(A(5, 6) == doctest::Approx(-f.G_m.real()));
  CHECK(A(7, 4) == doctest::Approx(-f.G_m.real()));
  CHECK(A(7, 5) == doctest::Approx(-f.G_m.imag()));
}

TEST_CASE("imperfect drift carries the backscattering and residual coupling") {
  auto p = test::baseline();
  p.J = 0.5 * p.kappa_m;
  p.g_ccw = 0.1 * p.g_cw;
  const Matrix8 A = build_drift(p, -p.omega_b, p.omega_b, {1e6, 2e6}, Variant::Imperfect);
  CHECK(A(0, 3) == p.J);
  CHECK(A(1, 2) == -p.J);
  CHECK(A(2, 5) == p.g_ccw);
  CHECK(A(5, 2) == -p.g_ccw);
  CHECK(A(0, 5) == p.g_cw);
  CHECK_THROWS_AS(build_drift(p, -p.omega_b, p.omega_b, {1e6, 2e6}, Variant::Ideal), ConfigError);
}

TEST_CASE("diffusion equals B diag(n) B^T of the input noise") {
  auto p = test::baseline();
  p.temperature = 0.15;
  p.J = 0.3 * p.kappa_m;
  p.g_ccw = 0.1 * p.g_cw;
  for (auto port : {DrivePort::CW, DrivePort::CCW}) {
    p.drive_port = port;
    const InputNoise noise = build_input_noise(p);
    const Matrix8 D = noise.B * noise.n.asDiagonal() * noise.B.transpose();
    CHECK(test::rel_diff(D, build_diffusion(p)) < 1e-14);
  }
}

TEST_CASE("stability edge at the phonon-optimal settings") {
  // Coupling-rate/power operating point with kappa_a = 5 MHz.
  const auto s = test::phonon_optimal();
  const auto f = solve_steady_state(s.params, s.detunings, s.variant);
  StabilityEdgeOptions opt;
  opt.phase = std::arg(f.G_m);
  const auto edge = max_stable_coupling(s.params, s.detunings, s.variant, opt);
  REQUIRE(edge.found);
  CHECK(edge.upper - edge.lower <= angular(0.01e6) + 1.0);
  CHECK(constants::hertz(edge.coupling) == doctest::Approx(11.9e6).epsilon(0.02));
  // Either side of the bracket behaves as reported.
  auto probe = [&](double g) {
    return is_stable(build_drift(s.params, s.detunings.delta_a, s.detunings.delta_m_eff,
                                 std::polar(g, opt.phase), s.variant)).stable;
  };
  CHECK(probe(edge.lower));
  CHECK_FALSE(probe(edge.upper));
}

TEST_CASE("zero coupling is stable") {
  const auto p = test::baseline();
  const auto info = is_stable(build_drift(p, -p.omega_b, p.omega_b, {0.0, 0.0}, Variant::Ideal));
  CHECK(info.stable);
  CHECK(info.abscissa == doctest::Approx(-p.gamma_b / 2).epsilon(1e-6));
}
