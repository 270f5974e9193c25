#include "cmm/output_mode.hpp"

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>
#include <algorithm>
#include <boost/math/special_functions/sinc.hpp>
#include <cmath>
#include <numbers>
#include <sstream>

#include "cmm/error.hpp"
#include "cmm/measures.hpp"
#include "cmm/quadrature.hpp"

namespace cmm {

using cplx = std::complex<double>;
using Matrix8d = Eigen::Matrix<double, 8, 8>;
using Row2c = Eigen::Matrix<cplx, 2, 10>;

std::string to_string(MagnonConvention convention) {
  return convention == MagnonConvention::Windowed ? "windowed" : "instant";
}

MagnonConvention magnon_convention_from_string(const std::string& text) {
  if (text == "windowed") return MagnonConvention::Windowed;
  if (text == "instant") return MagnonConvention::Instant;
  throw ConfigError("magnon convention must be 'windowed' or 'instant', got '" + text + "'");
}

std::complex<double> filter_transform(const FilterSpec& spec, double omega) {
  const double x = 0.5 * (omega - spec.omega_center) * spec.tau;
  return std::sqrt(spec.tau / (2.0 * std::numbers::pi)) * std::polar(1.0, x) *
         boost::math::sinc_pi(x);
}

InputNoise build_input_noise(const SystemParams& p) {
  InputNoise noise;
  const int driven = p.drive_port == DrivePort::CW ? 0 : 2;
  const int other = 2 - driven;
  noise.driven_row = driven;
  const double se = std::sqrt(2.0 * p.kappa_a_e);
  const double si = std::sqrt(2.0 * p.kappa_a_i);
  const double sa = std::sqrt(2.0 * p.kappa_a());
  const double sm = std::sqrt(2.0 * p.kappa_m);
  for (int k = 0; k < 2; ++k) {
    noise.B(driven + k, k) = se;
    noise.B(driven + k, 2 + k) = si;
    noise.B(other + k, 4 + k) = sa;
    noise.B(4 + k, 6 + k) = sm;
  }
  noise.B(7, 9) = 1.0;
  const double Na = thermal_occupancy(p.omega_a, p.temperature);
  const double Nm = thermal_occupancy(p.omega_m, p.temperature);
  const double Nb = thermal_occupancy(p.omega_b, p.temperature);
  noise.n << Na + 0.5, Na + 0.5, Na + 0.5, Na + 0.5, Na + 0.5, Na + 0.5, Nm + 0.5, Nm + 0.5, 0.0,
      p.gamma_b * (2.0 * Nb + 1.0);
  return noise;
}

Matrix8c susceptibility(const Matrix8d& A, double omega) {
  Matrix8c L = -A.cast<cplx>();
  L.diagonal().array() += cplx(0.0, -omega);
  return L.partialPivLu().inverse();
}

Matrix8d intracavity_spectrum(const Matrix8d& A, const Matrix8d& D, double omega) {
  const Matrix8c M = susceptibility(A, omega);
  return (M * D.cast<cplx>() * M.adjoint()).real();
}

namespace {

/// Quadrature transfer of a window acting on the two sidebands +-w:
/// (1/2) [[g+, i g-], [-i g-, g+]], g+- = gh(w) +- conj(gh(-w)), gh = sqrt(2pi) g.
Eigen::Matrix2cd window_transfer(const FilterSpec& spec, double omega) {
  const double s = std::sqrt(2.0 * std::numbers::pi);
  const cplx gp_w = s * filter_transform(spec, omega);
  const cplx gm_w = std::conj(s * filter_transform(spec, -omega));
  const cplx gp = gp_w + gm_w;
  const cplx gm = gp_w - gm_w;
  const cplx i(0.0, 1.0);
  Eigen::Matrix2cd T;
  T << gp, i * gm, -i * gm, gp;
  return 0.5 * T;
}

/// Output-type field sqrt(rate) x - x_in split into the system part P and the
/// direct input selector F (columns `input_col`, `input_col + 1`).
struct PortField {
  int row = 0;
  double rate = 0.0;
  int input_col = 0;
};

Row2c system_part(const Matrix8c& M, const InputNoise& noise, const PortField& port) {
  return std::sqrt(port.rate) * M.middleRows<2>(port.row) * noise.B.cast<cplx>();
}

Row2c selector(const PortField& port) {
  Row2c F = Row2c::Zero();
  F(0, port.input_col) = 1.0;
  F(1, port.input_col + 1) = 1.0;
  return F;
}

/// Spectrum of an output-type field minus its flat input part n I.
Eigen::Matrix2d subtracted_output_block(const Row2c& P, const Row2c& F, const Eigen::Matrix2cd& T,
                                        const Eigen::Matrix<cplx, 10, 10>& N) {
  const Row2c PN = P * N;
  const Eigen::Matrix2cd inner =
      PN * P.adjoint() - PN * F.adjoint() - F * N * P.adjoint();
  return (T * inner * T.adjoint()).real();
}

}  // namespace

Eigen::Matrix2d output_spectrum(const Matrix8d& A, const InputNoise& noise, double kappa_a_e,
                                double omega) {
  const Matrix8c M = susceptibility(A, omega);
  const PortField port{noise.driven_row, 2.0 * kappa_a_e, 0};
  const Row2c C = system_part(M, noise, port) - selector(port);
  const Eigen::Matrix<cplx, 10, 10> N = noise.n.cast<cplx>().asDiagonal();
  return (C * N * C.adjoint()).real();
}

FilteredPair filtered_pair_cm(const LinearModel& model, const SystemParams& params,
                              const FilterSpec& spec, MagnonConvention convention,
                              const FilterQuadratureOptions& options) {
  if (!(spec.tau > 0.0) || !std::isfinite(spec.tau) || !std::isfinite(spec.omega_center)) {
    throw ConfigError("filter: tau must be positive and the centre finite");
  }
  if (!model.stable) {
    throw InstabilityError("output_mode", "filtered output requires a stable drift matrix");
  }
  const InputNoise noise = build_input_noise(params);
  const Matrix8d& A = model.A;
  const Eigen::Matrix<cplx, 10, 10> N = noise.n.cast<cplx>().asDiagonal();
  const PortField out_port{noise.driven_row, 2.0 * params.kappa_a_e, 0};
  const PortField mag_port{4, 2.0 * params.kappa_m, 6};
  const FilterSpec mag_filter{params.omega_b, spec.tau};
  const bool windowed = convention == MagnonConvention::Windowed;
  const Row2c F_out = selector(out_port);
  const Row2c F_mag = selector(mag_port);

  // Integrand is even in w, so integrate over [0, L] with weight 1/pi.
  auto integrand = [&](double w) -> Eigen::Matrix4d {
    const Matrix8c M = susceptibility(A, w);
    const Eigen::Matrix2cd T_out = window_transfer(spec, w);
    const Row2c P_out = system_part(M, noise, out_port);
    const Row2c K_out = T_out * (P_out - F_out);
    Eigen::Matrix4d f = Eigen::Matrix4d::Zero();
    f.topLeftCorner<2, 2>() = subtracted_output_block(P_out, F_out, T_out, N);
    Row2c K_mag;
    if (windowed) {
      const Eigen::Matrix2cd T_mag = window_transfer(mag_filter, w);
      const Row2c P_mag = system_part(M, noise, mag_port);
      K_mag = T_mag * (P_mag - F_mag);
      f.bottomRightCorner<2, 2>() = subtracted_output_block(P_mag, F_mag, T_mag, N);
    } else {
      K_mag = M.middleRows<2>(4) * noise.B.cast<cplx>();
    }
    f.topRightCorner<2, 2>() = (K_out * N * K_mag.adjoint()).real();
    f.bottomLeftCorner<2, 2>() = f.topRightCorner<2, 2>().transpose();
    return f / std::numbers::pi;
  };

  const double width = std::max(40.0 / spec.tau,
                                10.0 * (params.kappa_a() + params.kappa_m + params.omega_b));
  const double L = std::abs(spec.omega_center) + width + (windowed ? params.omega_b : 0.0);

  std::vector<double> breaks{0.0, L};
  for (int k = 1; k < 64; ++k) breaks.push_back(L * k / 64.0);
  auto add = [&](double x) {
    if (x > 0.0 && x < L) breaks.push_back(x);
  };
  Eigen::EigenSolver<Matrix8d> es(A, false);
  for (int i = 0; i < 8; ++i) {
    const double centre = std::abs(es.eigenvalues()(i).imag());
    const double half_width = std::abs(es.eigenvalues()(i).real());
    add(centre);
    for (double k : {1.0, 4.0, 16.0, 64.0}) {
      add(centre - k * half_width);
      add(centre + k * half_width);
    }
  }
  const double lobe = 2.0 * std::numbers::pi / spec.tau;
  for (double c : {std::abs(spec.omega_center), windowed ? params.omega_b : -1.0}) {
    if (c < 0.0) continue;
    add(c);
    for (int k = 1; k * lobe < L; ++k) {
      add(c - k * lobe);
      add(c + k * lobe);
    }
  }

  const auto result = quadrature::integrate<Eigen::Matrix4d>(integrand, breaks, options.abs_tol,
                                                             options.max_intervals);

  // Tail beyond L: the integrand falls off at least as 1/w^2.
  double c2 = 0.0;
  for (int k = 0; k <= 8; ++k) {
    const double w = L * (1.0 + k / 8.0);
    c2 = std::max(c2, integrand(w).cwiseAbs().maxCoeff() * w * w);
  }
  const double tail = c2 / L;

  FilteredPair out;
  out.convention = convention;
  out.evaluations = result.evaluations + 9;
  out.tail_bound = tail;
  out.error_estimate = result.error + tail;
  if (!result.converged) {
    std::ostringstream msg;
    msg << "filtered-mode quadrature did not converge: error estimate " << result.error
        << " after " << result.intervals << " intervals (target " << options.abs_tol << ")";
    throw NumericalError("output_mode", msg.str());
  }

  Eigen::Matrix4d V = result.value;
  V.topLeftCorner<2, 2>() += noise.n(0) * Eigen::Matrix2d::Identity();
  if (windowed) {
    V.bottomRightCorner<2, 2>() += noise.n(6) * Eigen::Matrix2d::Identity();
  } else {
    const auto sol = solve_lyapunov(A, model.D);
    V.bottomRightCorner<2, 2>() = sol.V.block<2, 2>(4, 4);
  }
  V = 0.5 * (V + V.transpose()).eval();
  out.cov.V = V;
  out.cov.modes = {"out", "m"};
  try {
    out.bona_fide = symplectic_eigenvalues(V).minCoeff() >= 0.5 - 1e-6;
  } catch (const ConfigError&) {
    out.bona_fide = false;
  }
  return out;
}

}  // namespace cmm
