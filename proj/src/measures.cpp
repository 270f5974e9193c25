#include "cmm/measures.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>
#include <algorithm>
#include <boost/math/tools/minima.hpp>
#include <cmath>
#include <numbers>

#include "cmm/error.hpp"

namespace cmm {

namespace {

constexpr double kClip = 1e-12;

Eigen::MatrixXd symplectic_form(Eigen::Index modes) {
  Eigen::MatrixXd omega = Eigen::MatrixXd::Zero(2 * modes, 2 * modes);
  for (Eigen::Index k = 0; k < modes; ++k) {
    omega(2 * k, 2 * k + 1) = 1.0;
    omega(2 * k + 1, 2 * k) = -1.0;
  }
  return omega;
}

// Values below kClip are rounding noise of a separable state.
double negativity_from(double nu) {
  const double e = -std::log(2.0 * nu);
  return e < kClip ? 0.0 : e;
}

}  // namespace

Eigen::VectorXd symplectic_eigenvalues(const Eigen::MatrixXd& V) {
  const Eigen::Index dim = V.rows();
  if (V.cols() != dim || dim % 2 != 0 || dim == 0) {
    throw ConfigError("symplectic_eigenvalues: need a square matrix of even size");
  }
  const double scale = V.norm();
  if ((V - V.transpose()).norm() > 1e-10 * scale) {
    throw ConfigError("symplectic_eigenvalues: matrix is not symmetric");
  }
  // Omega V is similar to L^T Omega L (V = L L^T), an antisymmetric matrix K
  // whose spectrum is +-i nu; K^T K is then symmetric with eigenvalues nu^2.
  Eigen::LLT<Eigen::MatrixXd> llt(0.5 * (V + V.transpose()));
  if (llt.info() != Eigen::Success) {
    throw ConfigError("symplectic_eigenvalues: matrix is not positive definite");
  }
  const Eigen::MatrixXd L = llt.matrixL();
  const Eigen::MatrixXd K = L.transpose() * symplectic_form(dim / 2) * L;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(K.transpose() * K, Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success) {
    throw NumericalError("measures", "symplectic eigenvalue computation failed");
  }
  const Eigen::VectorXd squares = es.eigenvalues();  // ascending, pairwise equal
  Eigen::VectorXd nu(dim / 2);
  for (Eigen::Index k = 0; k < dim / 2; ++k) {
    const double a = squares(2 * k);
    const double b = squares(2 * k + 1);
    if (std::abs(a - b) > 1e-6 * std::max(std::abs(b), 1e-300) + 1e-14 * scale * scale) {
      throw ConfigError("symplectic_eigenvalues: spectrum does not pair up");
    }
    nu(k) = std::sqrt(std::max(0.0, 0.5 * (a + b)));
  }
  return nu;
}

bool is_bona_fide(const Eigen::MatrixXd& V, double tolerance) {
  try {
    return symplectic_eigenvalues(V).minCoeff() >= 0.5 - tolerance;
  } catch (const ConfigError&) {
    return false;
  }
}

// The closed-form eta^2 from the 2x2 block determinants loses half the digits
// near a degenerate spectrum, so the partially transposed spectrum is used.
double log_negativity(const Eigen::Matrix4d& V) {
  return partial_transpose_log_negativity(V, 0, nullptr);
}

double partial_transpose_log_negativity(const Eigen::MatrixXd& V, int single,
                                        int* eigenvalues_below_half) {
  const auto modes = static_cast<int>(V.rows() / 2);
  if (single < 0 || single >= modes) {
    throw ConfigError("partial transpose: mode index out of range");
  }
  Eigen::MatrixXd W = V;
  W.row(2 * single + 1) *= -1.0;
  W.col(2 * single + 1) *= -1.0;
  const Eigen::VectorXd nu = symplectic_eigenvalues(W);
  if (eigenvalues_below_half) {
    *eigenvalues_below_half = static_cast<int>((nu.array() < 0.5 - kClip).count());
  }
  return negativity_from(nu.minCoeff());
}

ContangleReport residual_contangle_min(const Eigen::Matrix<double, 6, 6>& V) {
  ContangleReport report;
  auto pair_block = [&](int i, int j) {
    Eigen::Matrix4d P;
    const int idx[4] = {2 * i, 2 * i + 1, 2 * j, 2 * j + 1};
    for (int r = 0; r < 4; ++r) {
      for (int c = 0; c < 4; ++c) P(r, c) = V(idx[r], idx[c]);
    }
    return P;
  };
  report.pairwise = {log_negativity(pair_block(0, 1)), log_negativity(pair_block(0, 2)),
                     log_negativity(pair_block(1, 2))};
  auto pairwise = [&](int i, int j) {
    if (i > j) std::swap(i, j);
    return report.pairwise[i == 0 ? (j == 1 ? 0 : 1) : 2];
  };
  double r_min = 0.0;
  for (int i = 0; i < 3; ++i) {
    int below = 0;
    report.one_vs_two[i] = partial_transpose_log_negativity(V, i, &below);
    if (below > 1) report.extra_negative_eigenvalue = true;
    const int j = (i + 1) % 3;
    const int k = (i + 2) % 3;
    const double e_ij = pairwise(i, j);
    const double e_ik = pairwise(i, k);
    report.residual[i] = report.one_vs_two[i] * report.one_vs_two[i] - e_ij * e_ij - e_ik * e_ik;
    if (report.residual[i] < -1e-9) report.monogamy_violated = true;
    r_min = i == 0 ? report.residual[i] : std::min(r_min, report.residual[i]);
  }
  report.r_min = std::max(0.0, r_min);
  return report;
}

Eigen::Matrix2d coherent_input() { return 0.5 * Eigen::Matrix2d::Identity(); }

Eigen::Matrix2d rotation(double angle) {
  Eigen::Matrix2d R;
  R << std::cos(angle), -std::sin(angle), std::sin(angle), std::cos(angle);
  return R;
}

double teleportation_fidelity(const Eigen::Matrix4d& pair, const Eigen::Matrix2d& input) {
  const Eigen::Matrix2d sz = Eigen::Vector2d(1.0, -1.0).asDiagonal();
  const Eigen::Matrix2d Ve = pair.topLeftCorner<2, 2>();
  const Eigen::Matrix2d Vf = pair.bottomRightCorner<2, 2>();
  const Eigen::Matrix2d Vef = pair.topRightCorner<2, 2>();
  const Eigen::Matrix2d W =
      2.0 * input + sz * Ve * sz.transpose() + sz * Vef + Vef.transpose() * sz.transpose() + Vf;
  const double det = W.determinant();
  if (!(det > 0.0)) throw ConfigError("teleportation_fidelity: det V <= 0, invalid CM");
  return 1.0 / std::sqrt(det);
}

PhaseOptimizedFidelity optimal_teleportation_fidelity(const Eigen::Matrix4d& pair,
                                                      const Eigen::Matrix2d& input) {
  auto rotated = [&](double phase) {
    Eigen::Matrix4d S = Eigen::Matrix4d::Identity();
    S.topLeftCorner<2, 2>() = rotation(phase);
    return Eigen::Matrix4d(S * pair * S.transpose());
  };
  auto negative_fidelity = [&](double phase) {
    return -teleportation_fidelity(rotated(phase), input);
  };
  // A half turn flips the sign of the cross block, so the period is 2pi.
  constexpr int kGrid = 1440;
  const double step = 2.0 * std::numbers::pi / kGrid;
  int best = 0;
  double best_value = negative_fidelity(0.0);
  for (int i = 1; i < kGrid; ++i) {
    const double v = negative_fidelity(i * step);
    if (v < best_value) {
      best_value = v;
      best = i;
    }
  }
  const auto [phase, value] = boost::math::tools::brent_find_minima(
      negative_fidelity, (best - 1) * step, (best + 1) * step, 52);
  PhaseOptimizedFidelity out{-value, phase};
  if (-best_value > out.fidelity) out = {-best_value, best * step};
  out.phase = std::fmod(out.phase + 2.0 * std::numbers::pi, 2.0 * std::numbers::pi);
  return out;
}

}  // namespace cmm
