#include "cmm/params.hpp"

#include <cmath>

#include "cmm/constants.hpp"
#include "cmm/error.hpp"

namespace cmm {

double thermal_occupancy(double omega, double temperature) {
  if (!std::isfinite(omega) || !std::isfinite(temperature)) {
    throw ConfigError("thermal_occupancy: non-finite input");
  }
  if (omega <= 0.0 || temperature < 0.0) {
    throw ConfigError("thermal_occupancy: requires omega > 0 and T >= 0");
  }
  if (temperature == 0.0) return 0.0;
  const double x = constants::kHbar * omega / (constants::kBoltzmann * temperature);
  return 1.0 / std::expm1(x);
}

double drive_amplitude(double power, double omega_0, double kappa_a_e) {
  if (!std::isfinite(power) || !std::isfinite(omega_0) || !std::isfinite(kappa_a_e)) {
    throw ConfigError("drive_amplitude: non-finite input");
  }
  if (power < 0.0 || kappa_a_e < 0.0 || omega_0 <= 0.0) {
    throw ConfigError("drive_amplitude: requires P0 >= 0, kappa_a_e >= 0, omega_0 > 0");
  }
  return std::sqrt(2.0 * kappa_a_e * power / (constants::kHbar * omega_0));
}

namespace {

void check_rate(std::vector<Diagnostic>& out, const char* name, double value, bool positive) {
  if (!std::isfinite(value)) {
    out.push_back({Severity::Error, name, "must be finite"});
  } else if (value < 0.0) {
    out.push_back({Severity::Error, name, "must be non-negative"});
  } else if (positive && value == 0.0) {
    out.push_back({Severity::Error, name, "must be strictly positive"});
  }
}

}  // namespace

std::vector<Diagnostic> validate(const SystemParams& p) {
  std::vector<Diagnostic> out;
  check_rate(out, "omega_a", p.omega_a, true);
  check_rate(out, "omega_m", p.omega_m, true);
  check_rate(out, "omega_b", p.omega_b, true);
  check_rate(out, "omega_0", p.omega_0, true);
  check_rate(out, "kappa_a_i", p.kappa_a_i, false);
  check_rate(out, "kappa_a_e", p.kappa_a_e, false);
  check_rate(out, "kappa_m", p.kappa_m, true);
  check_rate(out, "gamma_b", p.gamma_b, true);
  check_rate(out, "g_cw", p.g_cw, false);
  check_rate(out, "g_ccw", p.g_ccw, false);
  check_rate(out, "J", p.J, false);
  check_rate(out, "temperature", p.temperature, false);
  if (p.g_m) check_rate(out, "g_m", *p.g_m, false);
  if (std::isfinite(p.kappa_a()) && p.kappa_a() <= 0.0) {
    out.push_back({Severity::Error, "kappa_a", "total cavity dissipation must be positive"});
  }

  std::visit(
      [&](const auto& d) {
        using T = std::decay_t<decltype(d)>;
        double v = 0.0;
        const char* name = "";
        if constexpr (std::is_same_v<T, DrivePower>) {
          v = d.watts;
          name = "drive.power";
        } else if constexpr (std::is_same_v<T, DriveAmplitude>) {
          v = d.rate;
          name = "drive.amplitude";
        } else {
          v = d.rate;
          name = "drive.coupling";
        }
        check_rate(out, name, v, false);
        if constexpr (std::is_same_v<T, CouplingMagnitude>) {
          if (p.detuning_mode == DetuningMode::Physical) {
            out.push_back({Severity::Error, "drive.coupling",
                           "a coupling-calibrated drive needs the effective detuning mode"});
          }
        }
      },
      p.drive);

  if (p.detuning_mode == DetuningMode::Physical && !p.g_m) {
    out.push_back({Severity::Error, "g_m", "physical detuning mode needs g_m"});
  }

  if (std::isfinite(p.omega_b) && std::isfinite(p.gamma_b) && p.gamma_b > 0.0 &&
      p.mechanical_quality() < 100.0) {
    out.push_back({Severity::Warning, "gamma_b",
                   "mechanical quality factor below 100; Markovian Brownian noise is questionable"});
  }
  if (std::isfinite(p.kappa_m) && std::isfinite(p.omega_b) && p.kappa_m >= p.omega_b &&
      p.omega_b > 0.0) {
    out.push_back({Severity::Warning, "kappa_m",
                   "kappa_m >= omega_b: magnon linewidth does not resolve the mechanical sidebands"});
  }
  return out;
}

bool has_errors(const std::vector<Diagnostic>& diagnostics) {
  for (const auto& d : diagnostics) {
    if (d.severity == Severity::Error) return true;
  }
  return false;
}

void require_valid(const SystemParams& params) {
  const auto diagnostics = validate(params);
  std::string message;
  for (const auto& d : diagnostics) {
    if (d.severity != Severity::Error) continue;
    if (!message.empty()) message += "; ";
    message += d.field + " " + d.message;
  }
  if (!message.empty()) throw ConfigError(message);
}

std::string to_string(DrivePort port) { return port == DrivePort::CW ? "cw" : "ccw"; }

std::string to_string(DetuningMode mode) {
  return mode == DetuningMode::Effective ? "effective" : "physical";
}

std::string to_string(Variant variant) {
  return variant == Variant::Ideal ? "ideal" : "imperfect";
}

}  // namespace cmm
