#include "doctest.h"
#include "support.hpp"

#include "cmm/error.hpp"
#include "cmm/pipeline.hpp"

using namespace cmm;
using cmm::test::angular;

namespace {

void check_physical(const EntReport& r) {
  CHECK(r.min_symplectic >= 0.5 - 1e-9);
  CHECK(r.lyapunov_residual <= 1e-10);
  for (const auto& c : {r.R_acw, r.R_accw}) {
    if (!c) continue;
    CHECK_FALSE(c->monogamy_violated);
    for (double res : c->residual) CHECK(res >= -1e-9);
  }
}

}  // namespace

TEST_CASE("magnon-optimal point: pinned measures") {
  const auto r = evaluate_point(test::magnon_optimal());
  REQUIRE(r.stable);
  check_physical(r);
  CHECK(r.E_acw_m == doctest::Approx(0.0503).epsilon(0.01));
  CHECK(r.E_acw_b == doctest::Approx(0.1375).epsilon(0.01));
  CHECK(r.E_m_b == doctest::Approx(0.1167).epsilon(0.01));
  REQUIRE(r.R_acw);
  CHECK(r.R_acw->r_min == doctest::Approx(0.012075).epsilon(0.01));
  CHECK(r.E_accw_m == 0.0);
  CHECK(r.E_accw_b == 0.0);
  CHECK(r.E_acw_accw == 0.0);
}

TEST_CASE("chiral system driven from the other side stays separable") {
  auto s = test::magnon_optimal();
  s.params.drive_port = DrivePort::CCW;
  const auto ccw = evaluate_point(s);
  REQUIRE(ccw.stable);
  for (auto name : {"E_acw_m", "E_acw_b", "E_accw_m", "E_accw_b", "E_m_b", "R_acw_m_b", "R_accw_m_b"}) {
    CHECK(measure(ccw, name) == 0.0);
  }
  const auto cw = evaluate_point(test::magnon_optimal());
  CHECK(nonreciprocity_contrast(cw, ccw, "E_acw_m") == 1.0);
  CHECK(nonreciprocity_contrast(cw, ccw, "R_acw_m_b") == 1.0);
  CHECK_THROWS_AS(measure(cw, "E_x"), ConfigError);
}

TEST_CASE("contrast needs reports that differ only in the port") {
  const auto cw = evaluate_point(test::magnon_optimal());
  auto s = test::magnon_optimal();
  s.params.drive_port = DrivePort::CCW;
  s.params.temperature = 0.02;
  const auto ccw = evaluate_point(s);
  CHECK_THROWS_AS(nonreciprocity_contrast(cw, ccw, "E_acw_m"), ConfigError);
}

TEST_CASE("unstable points are reported, not measured") {
  auto s = test::phonon_optimal();
  s.params.drive = CouplingMagnitude{angular(14e6)};
  const auto r = evaluate_point(s);
  CHECK_FALSE(r.stable);
  CHECK(r.abscissa > 0.0);
  CHECK(r.E_acw_b == 0.0);
}

TEST_CASE("every covariance matrix along an imperfect sweep is physical") {
  Scenario base = test::magnon_optimal();
  base.params.g_ccw = 0.1 * base.params.g_cw;
  base.variant = Variant::Imperfect;
  SweepSpec spec;
  spec.axes = {{"J", 0.0, 2 * base.params.kappa_m, 9}, {"temperature", 0.001, 0.2, 5}};
  spec.ports = {DrivePort::CW, DrivePort::CCW};
  const auto rows = run_sweep(base, spec, 2);
  CHECK(rows.size() == 9 * 5 * 2);
  for (const auto& row : rows) {
    REQUIRE(row.report);
    if (row.report->stable) check_physical(*row.report);
  }
  // Row-major, CW before CCW.
  CHECK(rows[0].port == DrivePort::CW);
  CHECK(rows[1].port == DrivePort::CCW);
  CHECK(rows[2].coords[1] > rows[0].coords[1]);
}

TEST_CASE("sweep rows do not depend on the worker count") {
  Scenario base = test::phonon_optimal();
  SweepSpec spec;
  spec.axes = {{"delta_a", -2 * base.params.omega_b, 0.0, 13}, {"delta_m", 0.0, 2 * base.params.omega_b, 11}};
  const auto one = run_sweep(base, spec, 1);
  const auto four = run_sweep(base, spec, 4);
  REQUIRE(one.size() == four.size());
  for (std::size_t i = 0; i < one.size(); ++i) {
    CHECK(one[i].coords == four[i].coords);
    CHECK(one[i].report.has_value() == four[i].report.has_value());
    if (one[i].report && one[i].report->stable) {
      CHECK(one[i].report->E_acw_b == four[i].report->E_acw_b);
      CHECK(one[i].report->R_acw->r_min == four[i].report->R_acw->r_min);
    }
  }
}

TEST_CASE("per-point errors are captured in the row") {
  Scenario base = test::magnon_optimal();
  SweepSpec spec;
  spec.axes = {{"kappa_m", -angular(1e6), angular(1e6), 3}};
  const auto rows = run_sweep(base, spec, 1);
  REQUIRE(rows.size() == 3);
  CHECK(rows[0].error_category == ErrorCategory::Config);
  CHECK_FALSE(rows[0].error.empty());
  CHECK(rows[2].report.has_value());
}

TEST_CASE("sweep validation") {
  SweepSpec spec;
  CHECK_THROWS_AS(validate_sweep(spec), ConfigError);
  spec.axes = {{"omega_q", 0.0, 1.0, 5}};
  CHECK_THROWS_AS(validate_sweep(spec), ConfigError);
  spec.axes = {{"J", 0.0, 1.0, 0}};
  CHECK_THROWS_AS(validate_sweep(spec), ConfigError);
  spec.axes = {{"J", 0.0, 1.0, 5}};
  CHECK_NOTHROW(validate_sweep(spec));
  CHECK(spec.axes[0].value(0) == 0.0);
  CHECK(spec.axes[0].value(4) == 1.0);
  CHECK(is_sweepable("chi"));
  CHECK_FALSE(is_sweepable("omega_a"));
}

TEST_CASE("phase of the drive does not change the measures") {
  // A drive phase rotates G_m; the resulting CM differs by local rotations.
  const auto s = test::phonon_optimal();
  const auto ref = evaluate_point(s);
  const auto f = solve_steady_state(s.params, s.detunings, s.variant);
  for (double phi : {0.4, 2.0}) {
    LinearModel m = build_linear_model(s.params, s.detunings, f, s.variant);
    m.A = build_drift(s.params, s.detunings.delta_a, s.detunings.delta_m_eff,
                      f.G_m * std::polar(1.0, phi), s.variant);
    const auto V = solve_lyapunov(m.A, m.D).V;
    Eigen::Matrix4d pair;
    const int idx[] = {0, 1, 6, 7};
    for (int i = 0; i < 4; ++i)
      for (int j = 0; j < 4; ++j) pair(i, j) = V(idx[i], idx[j]);
    CHECK(log_negativity(pair) == doctest::Approx(ref.E_acw_b).epsilon(1e-9));
  }
}
