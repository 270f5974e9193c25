#pragma once

#include <Eigen/Core>
#include <array>
#include <complex>
#include <string_view>

#include "cmm/params.hpp"
#include "cmm/steady_state.hpp"

namespace cmm {

using Matrix8 = Eigen::Matrix<double, 8, 8>;

/// Quadrature ordering of the fluctuation vector u.
inline constexpr std::array<std::string_view, 8> kQuadratureOrder = {
    "X_a_cw", "Y_a_cw", "X_a_ccw", "Y_a_ccw", "X_m", "Y_m", "q", "p"};

/// Mode labels, two quadratures each, in the same order.
inline constexpr std::array<std::string_view, 4> kModeOrder = {"a_cw", "a_ccw", "m", "b"};

struct LinearModel {
  Matrix8 A = Matrix8::Zero();  // drift
  Matrix8 D = Matrix8::Zero();  // diffusion
  bool stable = false;
  double abscissa = 0.0;        // max real part of the spectrum of A
};

/// Drift matrix of the linearised fluctuations. IDEAL requires J = 0 and
/// g_ccw = 0; IMPERFECT adds the backscattering and residual-coupling entries.
Matrix8 build_drift(const SystemParams& params, double delta_a, double delta_m_eff,
                    std::complex<double> G_m, Variant variant);

/// diag[kappa_a(2N_a+1) x4, kappa_m(2N_m+1) x2, 0, gamma_b(2N_b+1)].
Matrix8 build_diffusion(const SystemParams& params);

struct StabilityInfo {
  bool stable = false;
  double abscissa = 0.0;
};

/// Stable iff every eigenvalue has real part below -1e-9 ||A||. Throws
/// NumericalError if the eigen-solver fails.
StabilityInfo is_stable(const Eigen::MatrixXd& A);

LinearModel build_linear_model(const SystemParams& params, const Detunings& detunings,
                               const SteadyField& steady, Variant variant);

struct StabilityEdge {
  bool found = false;       // false: stable up to the cap
  double coupling = 0.0;    // |G_m| at the edge, rad/s (midpoint of the final bracket)
  double lower = 0.0;       // last stable |G_m|
  double upper = 0.0;       // first unstable |G_m|
  double cap = 0.0;
  int evaluations = 0;
};

struct StabilityEdgeOptions {
  double cap = 0.0;         // rad/s; 0 selects 20 omega_b
  double resolution = 0.0;  // rad/s; 0 selects 2pi x 0.01 MHz
  double scan_step = 0.0;   // rad/s; 0 selects 2pi x 0.25 MHz
  double phase = 0.0;       // arg G_m
};

/// Largest |G_m| keeping the drift matrix stable at fixed detunings: upward
/// scan to the first unstable point, then bisection of that bracket.
StabilityEdge max_stable_coupling(const SystemParams& params, const Detunings& detunings,
                                  Variant variant, const StabilityEdgeOptions& options = {});

}  // namespace cmm
