#pragma once

#include <Eigen/Core>
#include <complex>
#include <string>

#include "cmm/linear_model.hpp"
#include "cmm/lyapunov.hpp"
#include "cmm/params.hpp"

namespace cmm {

/// Top-hat temporal window of duration tau centred at omega_center (rad/s,
/// measured in the frame rotating at the drive frequency).
struct FilterSpec {
  double omega_center = 0.0;
  double tau = 0.0;
};

/// g(w) = sqrt(tau / 2pi) exp[i (w - W) tau / 2] sinc[(w - W) tau / 2].
std::complex<double> filter_transform(const FilterSpec& spec, double omega);

/// Temporal mode used for the magnon partner of the filtered output.
/// WINDOWED: the magnon output-type field sqrt(2 kappa_m) m - m_in seen through
/// the same window, centred at +omega_b. INSTANT: stationary intracavity
/// magnon quadratures.
enum class MagnonConvention { Windowed, Instant };

std::string to_string(MagnonConvention convention);
MagnonConvention magnon_convention_from_string(const std::string& text);

using Matrix8c = Eigen::Matrix<std::complex<double>, 8, 8>;
using NoiseMatrix = Eigen::Matrix<double, 8, 10>;

/// White input noises, ten quadratures: driven cavity mode external port (0,1)
/// and internal loss (2,3), the other cavity mode (4,5), magnon (6,7), an
/// unused slot for q (8) and the Brownian force on p (9). D = B diag(n) B^T.
struct InputNoise {
  NoiseMatrix B = NoiseMatrix::Zero();
  Eigen::Matrix<double, 10, 1> n = Eigen::Matrix<double, 10, 1>::Zero();
  int driven_row = 0;  // first quadrature row of the driven cavity mode
};

InputNoise build_input_noise(const SystemParams& params);

/// M(w) = (-i w I - A)^-1.
Matrix8c susceptibility(const Eigen::Matrix<double, 8, 8>& A, double omega);

/// Re[M D M^H](w); its integral over dw / 2pi is the stationary CM.
Eigen::Matrix<double, 8, 8> intracavity_spectrum(const Eigen::Matrix<double, 8, 8>& A,
                                                 const Eigen::Matrix<double, 8, 8>& D, double omega);

/// Symmetrised spectrum of the quadratures of the output field
/// sqrt(2 kappa_a_e) a - a_in at the driven port (unfiltered).
Eigen::Matrix2d output_spectrum(const Eigen::Matrix<double, 8, 8>& A, const InputNoise& noise,
                                double kappa_a_e, double omega);

struct FilteredPair {
  CovMatrix cov;               // modes {"out", "m"}
  double error_estimate = 0.0; // quadrature estimate plus tail bound, max entry
  double tail_bound = 0.0;
  int evaluations = 0;
  bool bona_fide = false;      // symplectic eigenvalues >= 1/2 - 1e-6
  MagnonConvention convention = MagnonConvention::Instant;
};

struct FilterQuadratureOptions {
  double abs_tol = 1e-6;
  int max_intervals = 60000;
};

/// CM of the filtered output mode and the magnon for a stable linear model.
/// Throws InstabilityError for an unstable model, NumericalError (with the
/// achieved error estimate) when the quadrature does not converge.
FilteredPair filtered_pair_cm(const LinearModel& model, const SystemParams& params,
                              const FilterSpec& spec, MagnonConvention convention,
                              const FilterQuadratureOptions& options = {});

}  // namespace cmm
