#pragma once

#include <array>
#include <complex>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "cmm/params.hpp"

namespace cmm {

/// Classical state (a_cw, a_ccw, m, q, p); complex amplitudes dimensionless.
struct ClassicalState {
  std::complex<double> a_cw;
  std::complex<double> a_ccw;
  std::complex<double> m;
  double q = 0.0;
  double p = 0.0;
};

struct IntegratorStats {
  long rhs_evaluations = 0;
  double rel_tol = 0.0;
  double abs_tol = 0.0;
};

struct Trajectory {
  std::vector<double> t;  // s
  std::vector<ClassicalState> x;
  IntegratorStats stats;
};

/// Raw-frame settings for the nonlinear mean-field equations. delta_m is the
/// bare magnon detuning; the shift g_m q is generated by the dynamics.
struct ClassicalDrive {
  double delta_a = 0.0;
  double delta_m = 0.0;
  double E = 0.0;     // rad/s, real, into the driven port
  double g_m = 0.0;   // rad/s
};

struct IntegrationOptions {
  double t_end = 0.0;            // s
  int samples = 0;               // output grid points; 0 selects ~20 per mechanical period
  double rel_tol = 1e-9;
  double abs_tol = 1e-12;
  ClassicalState initial{};
};

/// Mean-field equations with backscattering J and both cavity-magnon couplings;
/// the drive enters the port selected by params.drive_port. Dense-output
/// Dormand-Prince 5(4) on the rescaled amplitudes g_m (a, m, q, p), so the
/// result depends on g_m and E only through g_m E (plain amplitudes when
/// g_m = 0). Tolerances apply to the rescaled state. Throws NumericalError on
/// integration failure.
Trajectory integrate_classical(const SystemParams& params, const ClassicalDrive& drive,
                               const IntegrationOptions& options);

/// 5 / min(kappa_a, kappa_m[, gamma_b / 2]) + 200 mechanical periods. gamma_b
/// enters only when gamma_b / 2 >= 0.01 min(kappa_a, kappa_m).
double default_horizon(const SystemParams& params);

enum class Attractor { Steady, Oscillatory };
std::string to_string(Attractor attractor);

struct AttractorInfo {
  Attractor kind = Attractor::Steady;
  double relative_peak_to_peak = 0.0;  // of |m| over the analysis window
  double mean_abs_m = 0.0;
  double dominant_frequency = 0.0;     // rad/s, of |m| - mean over the window
  int window_samples = 0;
};

/// Analysis window is the final 20% of the trajectory; STEADY iff the relative
/// peak-to-peak variation of |m| there is below `threshold`. Throws
/// NumericalError when the window spans fewer than 10 mechanical periods.
AttractorInfo classify_attractor(const Trajectory& trajectory, double omega_b,
                                 double threshold = 1e-3);

struct CombOptions {
  double cap = 0.0;          // rad/s on |G_m|; 0 selects 2pi x 30 MHz
  double scan_step = 0.0;    // rad/s; 0 selects 2pi x 1 MHz
  double resolution = 0.0;   // rad/s; 0 selects 2pi x 0.05 MHz
  double t_end = 0.0;        // 0 selects default_horizon
  std::optional<double> g_m; // overrides params.g_m / the inferred constant
};

struct CombProbe {
  double target = 0.0;        // |G_m| of the fixed point being probed, rad/s
  double late_coupling = 0.0; // sqrt(2) g_m mean |m| over the window, rad/s
  AttractorInfo attractor;
  bool integration_failed = false;
};

struct CombThreshold {
  bool found = false;
  double coupling = 0.0;  // midpoint of the final bracket, rad/s
  double lower = 0.0;     // last STEADY target
  double upper = 0.0;     // first OSCILLATORY target
  double late_coupling_lower = 0.0;
  double g_m = 0.0;
  double drive_at_threshold = 0.0;  // E, rad/s
  std::string note;
  std::vector<CombProbe> probes;
};

/// Drive at which the fixed point with coupling `target` sits at effective
/// magnon detuning delta_m_eff, together with the bare detuning that produces
/// it. Returns nullopt when the driven port does not reach the magnon.
std::optional<ClassicalDrive> drive_for_coupling(const SystemParams& params, double delta_a,
                                                 double delta_m_eff, double target, double g_m,
                                                 Variant variant);

/// Smallest |G_m| at which the classical dynamics stop settling: upward scan
/// of fixed-point couplings at constant effective detuning, then bisection.
CombThreshold comb_threshold(const SystemParams& params, const Detunings& detunings,
                             Variant variant, const CombOptions& options = {});

/// CSV with a commented column description, one row per sample.
void write_trajectory_csv(std::ostream& os, const Trajectory& trajectory, double g_m);

}  // namespace cmm
