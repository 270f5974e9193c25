#include "doctest.h"
#include "support.hpp"

#include <fstream>

#include "cmm/config.hpp"
#include "cmm/error.hpp"

using namespace cmm;
using cmm::test::angular;

namespace {

int error_line(const std::string& text) {
  try {
    RawConfig::parse(text);
  } catch (const ConfigError& e) {
    return e.line();
  }
  return -1;
}

RunConfig resolve_text(const std::string& text) { return resolve_config(RawConfig::parse(text)); }

}  // namespace

TEST_CASE("parse errors carry the line number") {
  CHECK(error_line("[system]\nkappa_m = 1 MHz\n[nonsense]\n") == 3);
  CHECK(error_line("[system]\n\n# comment\nbogus = 3\n") == 4);
  CHECK(error_line("kappa_m = 1 MHz\n") == 1);
  CHECK(error_line("[system]\nkappa_m 1 MHz\n") == 2);
  CHECK(error_line("[system]\nkappa_m = 1 MHz\nkappa_m = 2 MHz\n") == 3);
  CHECK(error_line("[system\n") == 1);
  CHECK(error_line("[system]\nkappa_m =\n") == 2);
  CHECK(error_line("[system] ; trailing\nkappa_m = 1 MHz # note\n") == -1);
}

TEST_CASE("resolution errors name the key and the line") {
  try {
    resolve_text("[system]\ng_cw = 4 parsecs\n");
    FAIL("expected a ConfigError");
  } catch (const ConfigError& e) {
    const std::string msg = e.what();
    CHECK(msg.find("g_cw") != std::string::npos);
    CHECK(e.line() == 2);
  }
  CHECK_THROWS_AS(resolve_text("[system]\nkappa_m = 3\n"), ConfigError);
  CHECK_THROWS_AS(resolve_text("[system]\nkappa_m = 2 kappa_m\n"), ConfigError);
  CHECK_THROWS_AS(resolve_text("[system]\nchi = 0.1\ng_ccw = 1 MHz\n"), ConfigError);
  CHECK_THROWS_AS(resolve_text("[drive]\npower = 1 W\ncoupling = 1 MHz\n"), ConfigError);
  CHECK_THROWS_AS(resolve_text("[sweep]\nx_var = omega_q\nx_start = 0\nx_stop = 0\nx_count = 3\n"),
                  ConfigError);
}

TEST_CASE("units resolve to SI and angular rates") {
  const auto cfg = resolve_text(
      "[system]\n"
      "omega_b = 10 MHz\n"
      "kappa_m = 6283185.307179586 rad/s\n"
      "kappa_a_e = 0.0048 GHz\n"
      "gamma_b = 0.1 kHz\n"
      "J = 0.5 kappa_m\n"
      "chi = 0.1\n"
      "temperature = 80 mK\n"
      "[drive]\npower = 250 mW\n"
      "[detuning]\ndelta_a = -0.76 omega_b\ndelta_m = 0.65 omega_b\n"
      "[filter]\ncenter = -1 omega_b\ntau = 1.5 us\n");
  const auto& p = cfg.scenario.params;
  CHECK(p.omega_b == doctest::Approx(angular(10e6)).epsilon(1e-15));
  CHECK(p.kappa_m == doctest::Approx(angular(1e6)).epsilon(1e-15));
  CHECK(p.kappa_a_e == doctest::Approx(angular(4.8e6)).epsilon(1e-15));
  CHECK(p.gamma_b == doctest::Approx(angular(100)).epsilon(1e-15));
  CHECK(p.J == doctest::Approx(0.5 * angular(1e6)).epsilon(1e-15));
  CHECK(p.g_ccw == doctest::Approx(0.1 * p.g_cw).epsilon(1e-15));
  CHECK(p.temperature == doctest::Approx(0.08).epsilon(1e-15));
  REQUIRE(std::holds_alternative<DrivePower>(p.drive));
  CHECK(std::get<DrivePower>(p.drive).watts == doctest::Approx(0.25).epsilon(1e-15));
  CHECK(cfg.scenario.detunings.delta_a == doctest::Approx(-0.76 * angular(10e6)).epsilon(1e-15));
  CHECK(cfg.scenario.variant == Variant::Imperfect);
  REQUIRE(cfg.evaluate.filter);
  CHECK(cfg.evaluate.filter->tau == doctest::Approx(1.5e-6).epsilon(1e-15));
  CHECK(cfg.evaluate.filter->omega_center == doctest::Approx(-angular(10e6)).epsilon(1e-15));
}

TEST_CASE("resolved echo is a fixed point of the resolver") {
  const auto first = resolve_text(read_text_file(preset_path("fig4c")));
  RawConfig again;
  for (const auto& line : first.resolved) {
    const auto eq = line.find(" = ");
    const std::string key = line.substr(0, eq);
    const std::string value = line.substr(eq + 3);
    if (value == "unset" || value == "steady-state") continue;
    if (value.rfind("0 ", 0) == 0 && key.rfind("comb.", 0) == 0) continue;
    if (value.rfind("0 ", 0) == 0 && key.rfind("stability.", 0) == 0) continue;
    again.set(key, value, "echo");
  }
  const auto second = resolve_config(again);
  CHECK(second.resolved == first.resolved);
  CHECK(second.digest == first.digest);
}

TEST_CASE("run settings do not enter the digest") {
  const auto a = resolve_text("[run]\nworkers = 1\n");
  const auto b = resolve_text("[run]\nworkers = 3\nout = elsewhere.csv\n");
  CHECK(a.digest == b.digest);
  const auto c = resolve_text("[system]\ntemperature = 11 mK\n");
  CHECK(a.digest != c.digest);
}

TEST_CASE("command-line overrides win over file values") {
  RawConfig raw = RawConfig::parse("[system]\ntemperature = 20 mK\n");
  raw.set("system.temperature=30 mK");
  CHECK(resolve_config(raw).scenario.params.temperature == doctest::Approx(0.03));
  CHECK_THROWS_AS(raw.set("system.colour=red"), ConfigError);
  CHECK_THROWS_AS(raw.set("no-equals-sign"), ConfigError);
}

TEST_CASE("every bundled preset resolves") {
  for (auto name : {"fig2a", "fig2b", "fig2c", "fig2d", "fig2d_b", "fig3a", "fig3b", "fig4a", "fig4b",
                    "fig4c", "fig4d", "fig5a", "fig5b", "fig6a", "fig6b", "figS1"}) {
    INFO(name);
    CHECK_NOTHROW(resolve_config(RawConfig::parse(read_text_file(preset_path(name)), name)));
  }
  CHECK_THROWS_AS(read_text_file(preset_path("no-such-preset")), ConfigError);
}
