#pragma once

#include <Eigen/Core>
#include <span>
#include <string>
#include <vector>

namespace cmm {

struct LinearModel;

/// Covariance matrix of quadrature fluctuations, vacuum variance 1/2.
/// Quadratures are ordered (X, Y) per mode, modes in the order of `modes`.
struct CovMatrix {
  Eigen::MatrixXd V;
  std::vector<std::string> modes;

  int n_modes() const { return static_cast<int>(modes.size()); }
  /// Position of a mode label; throws ConfigError if absent.
  int index_of(const std::string& mode) const;
};

struct LyapunovSolution {
  Eigen::MatrixXd V;
  double relative_residual = 0.0;  // ||AV + VA^T + D|| / (||A|| ||V|| + ||D||)
  double rcond = 0.0;              // reciprocal condition estimate of the reduced system
  std::vector<std::string> warnings;
};

/// Solves A V + V A^T = -D for symmetric V by a dense solve over the
/// n(n+1)/2 independent entries, so V is symmetric by construction.
/// Refuses unstable A (InstabilityError); a singular reduced system raises
/// NumericalError.
LyapunovSolution solve_lyapunov(const Eigen::MatrixXd& A, const Eigen::MatrixXd& D);

/// Same equation via complex Schur decomposition and triangular
/// back-substitution (Bartels-Stewart). No stability check.
Eigen::MatrixXd solve_lyapunov_schur(const Eigen::MatrixXd& A, const Eigen::MatrixXd& D);

/// Steady-state covariance of all four modes; throws InstabilityError when
/// the model is unstable.
CovMatrix steady_covariance(const LinearModel& model);

/// Principal submatrix of the requested modes, in the requested order.
CovMatrix extract_block(const CovMatrix& cov, std::span<const std::string> modes);
CovMatrix extract_block(const CovMatrix& cov, std::initializer_list<std::string> modes);

}  // namespace cmm
