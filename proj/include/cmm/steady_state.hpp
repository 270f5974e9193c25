#pragma once

#include <complex>
#include <vector>

#include "cmm/params.hpp"

namespace cmm {

using complex = std::complex<double>;

/// Classical steady-state means. Cavity and magnon amplitudes are
/// dimensionless; G_m and the detunings are in rad/s.
struct SteadyField {
  complex a_cw;
  complex a_ccw;
  complex m;
  double q_mean = 0.0;
  complex G_m;
  double delta_m = 0.0;      // bare magnon detuning consistent with delta_m_eff
  double delta_m_eff = 0.0;
  double drive = 0.0;        // E, rad/s
  double g_m = 0.0;          // single-magnon coupling used for the absolute means
  bool g_m_inferred = false; // g_m was not configured; the inferred constant was used
};

/// Means per unit drive amplitude, i.e. <a_cw>/E, <a_ccw>/E, <m>/E (units s).
struct MeanResponse {
  complex a_cw;
  complex a_ccw;
  complex m;
};

/// Closed-form response of the chiral, backscatter-free system. Requires
/// J = 0 and g_ccw = 0. A CCW drive leaves the magnon undriven.
MeanResponse ideal_response(const SystemParams& params, double delta_a, double delta_m_eff);

/// Closed-form response with backscattering J and residual coupling g_ccw,
/// for either drive port. Throws NumericalError on a singular configuration.
MeanResponse imperfect_response(const SystemParams& params, double delta_a, double delta_m_eff);

/// Direct solve of the 3x3 complex linear mean-field equations.
MeanResponse mean_field_response(const SystemParams& params, double delta_a, double delta_m_eff);

MeanResponse response(const SystemParams& params, double delta_a, double delta_m_eff, Variant variant);

/// Single-magnon magnomechanical coupling back-derived from the pair
/// |G_m| = 2pi x 8.5 MHz <-> P0 = 0.9 W at the reference configuration
/// (kappa_a = 2pi x 5 MHz, kappa_a_e = 2pi x 4.8 MHz, g_cw = 2pi x 8 MHz,
/// delta_a = -0.76 omega_b, delta_m_eff = 0.65 omega_b). An inferred value,
/// used only where absolute means are needed and g_m is not configured.
double inferred_single_magnon_coupling();

/// Configured g_m, or the inferred constant.
double single_magnon_coupling(const SystemParams& params);

/// Resolves the drive spec to the amplitude E (rad/s). A coupling-calibrated
/// drive uses the ideal CW response at the given detunings as reference.
double resolve_drive(const SystemParams& params, const Detunings& detunings);

/// Means for the ideal chiral system. EFFECTIVE mode evaluates directly at
/// detunings.delta_m_eff; PHYSICAL mode solves the frequency shift.
SteadyField ideal_means(const SystemParams& params, const Detunings& detunings, double drive);

/// Means including J and g_ccw. Reduces to ideal_means when both vanish.
SteadyField imperfect_means(const SystemParams& params, const Detunings& detunings, double drive);

struct SelfConsistentResult {
  SteadyField field;
  int iterations = 0;
  bool used_bracketing = false;
  /// |<m>|^2 of every branch found by the scan, ascending.
  std::vector<double> branches;
  bool multistable() const { return branches.size() > 1; }
};

/// Solves delta_m_eff = delta_m - g_m^2 |<m>|^2 / omega_b together with the
/// mean-field response. Damped fixed-point iteration (damping 0.5, rel. tol.
/// 1e-12, 500 iterations) backed by a bracketing scan of the scalar equation
/// for |<m>|^2; the lowest branch (continuously connected to zero drive) is
/// returned when several coexist.
SelfConsistentResult self_consistent_solve(const SystemParams& params, const Detunings& detunings,
                                           double drive, Variant variant);

/// Resolves the drive and evaluates the means for the configured detuning mode.
SteadyField solve_steady_state(const SystemParams& params, const Detunings& detunings,
                               Variant variant);

}  // namespace cmm
