#pragma once

#include <Eigen/Core>
#include <array>

namespace cmm {

/// Symplectic eigenvalues of a 2n x 2n covariance matrix, ascending.
/// Ordering per mode is (X, Y). Throws ConfigError for a matrix that is not
/// symmetric positive definite or whose spectrum does not pair up.
Eigen::VectorXd symplectic_eigenvalues(const Eigen::MatrixXd& V);

/// Whether every symplectic eigenvalue is >= 1/2 - tolerance.
bool is_bona_fide(const Eigen::MatrixXd& V, double tolerance = 1e-9);

/// Two-mode logarithmic negativity E_N = max[0, -ln(2 eta)], eta the smaller
/// symplectic eigenvalue of the partial transpose. Equal to the closed form
/// eta^2 = [Sigma - sqrt(Sigma^2 - 4 det V)] / 2, Sigma = det V_e + det V_f
/// - 2 det V_ef, but accurate near a degenerate spectrum. Values below 1e-12
/// are reported as 0.
double log_negativity(const Eigen::Matrix4d& V);

/// max[0, -ln(2 nu_min)] with nu_min the smallest symplectic eigenvalue after
/// transposing mode `single` (momentum sign flip). Works for any mode count.
double partial_transpose_log_negativity(const Eigen::MatrixXd& V, int single,
                                        int* eigenvalues_below_half = nullptr);

struct ContangleReport {
  double r_min = 0.0;                  // floored at 0
  std::array<double, 3> residual{};    // R^{i|jk}
  std::array<double, 3> one_vs_two{};  // E_{i|jk}
  std::array<double, 3> pairwise{};    // E_{01}, E_{02}, E_{12}
  bool monogamy_violated = false;      // some R^{i|jk} < -1e-9
  bool extra_negative_eigenvalue = false;  // a second transposed eigenvalue < 1/2 was seen
};

/// Minimum residual contangle of a three-mode CM, with squared logarithmic
/// negativities as contangles.
ContangleReport residual_contangle_min(const Eigen::Matrix<double, 6, 6>& V);

/// Coherent-state input, diag[1/2, 1/2].
Eigen::Matrix2d coherent_input();

/// F = 1 / sqrt(det W), W = 2 V_in + sz V_e sz + sz V_ef + V_ef^T sz + V_f,
/// mode e being the one combined with the input at the Bell measurement.
double teleportation_fidelity(const Eigen::Matrix4d& pair,
                              const Eigen::Matrix2d& input = coherent_input());

struct PhaseOptimizedFidelity {
  double fidelity = 0.0;
  double phase = 0.0;  // rotation of mode e's quadratures, [0, 2pi)
};

/// Fidelity maximised over the local phase reference of mode e.
PhaseOptimizedFidelity optimal_teleportation_fidelity(
    const Eigen::Matrix4d& pair, const Eigen::Matrix2d& input = coherent_input());

Eigen::Matrix2d rotation(double angle);

}  // namespace cmm
