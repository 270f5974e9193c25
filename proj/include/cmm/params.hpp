#pragma once

#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace cmm {

/// Which circulating cavity mode the external field drives.
enum class DrivePort { CW, CCW };

/// IDEAL: chiral coupling without backscattering (J = 0, g_ccw = 0).
/// IMPERFECT: backscattering J and residual coupling g_ccw included.
enum class Variant { Ideal, Imperfect };

/// PHYSICAL: the bare magnon detuning is given and the mechanical frequency
/// shift is solved self-consistently. EFFECTIVE: the shifted detuning is given.
enum class DetuningMode { Physical, Effective };

struct DrivePower {
  double watts = 0.0;
};
struct DriveAmplitude {
  double rate = 0.0;  // E, rad/s
};
/// Drive calibrated by the effective magnomechanical coupling |G_m| (rad/s)
/// that the CW port would produce in the chiral, backscatter-free system at
/// the same detunings. For that system the realised |G_m| equals this value.
struct CouplingMagnitude {
  double rate = 0.0;
};
using DriveSpec = std::variant<DrivePower, DriveAmplitude, CouplingMagnitude>;

/// All physical inputs. Angular frequencies and rates in rad/s, temperature in K.
struct SystemParams {
  double omega_a = 0.0;
  double omega_m = 0.0;
  double omega_b = 0.0;
  double omega_0 = 0.0;
  double kappa_a_i = 0.0;
  double kappa_a_e = 0.0;
  double kappa_m = 0.0;
  double gamma_b = 0.0;
  double g_cw = 0.0;
  double g_ccw = 0.0;
  std::optional<double> g_m;
  double J = 0.0;
  double temperature = 0.0;
  DrivePort drive_port = DrivePort::CW;
  DriveSpec drive = CouplingMagnitude{};
  DetuningMode detuning_mode = DetuningMode::Effective;

  double kappa_a() const { return kappa_a_i + kappa_a_e; }
  /// g_ccw / g_cw; zero when g_cw vanishes.
  double chi() const { return g_cw > 0.0 ? g_ccw / g_cw : 0.0; }
  double mechanical_quality() const { return omega_b / gamma_b; }
};

/// Detunings from the drive, rad/s. delta_m_eff includes the shift g_m <q>.
struct Detunings {
  double delta_a = 0.0;
  double delta_m = 0.0;
  double delta_m_eff = 0.0;

  static Detunings effective(double delta_a, double delta_m_eff) {
    return {delta_a, delta_m_eff, delta_m_eff};
  }
  static Detunings physical(double delta_a, double delta_m) {
    return {delta_a, delta_m, delta_m};
  }
};

/// Bose-Einstein occupancy [exp(hbar omega / k_B T) - 1]^-1; 0 at T = 0.
double thermal_occupancy(double omega, double temperature);

/// Drive rate E = sqrt(2 kappa_e P0 / (hbar omega_0)), rad/s.
double drive_amplitude(double power, double omega_0, double kappa_a_e);

enum class Severity { Warning, Error };

struct Diagnostic {
  Severity severity;
  std::string field;
  std::string message;
};

/// Checks the parameter invariants. Never throws; the caller decides whether
/// errors abort.
std::vector<Diagnostic> validate(const SystemParams& params);

bool has_errors(const std::vector<Diagnostic>& diagnostics);

/// Throws ConfigError listing every error-severity diagnostic.
void require_valid(const SystemParams& params);

std::string to_string(DrivePort port);
std::string to_string(DetuningMode mode);
std::string to_string(Variant variant);

}  // namespace cmm
