#include "cmm/lyapunov.hpp"

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>
#include <algorithm>
#include <sstream>

#include "cmm/error.hpp"
#include "cmm/linear_model.hpp"

namespace cmm {

int CovMatrix::index_of(const std::string& mode) const {
  const auto it = std::find(modes.begin(), modes.end(), mode);
  if (it == modes.end()) throw ConfigError("unknown mode label '" + mode + "'");
  return static_cast<int>(it - modes.begin());
}

namespace {

double relative_residual(const Eigen::MatrixXd& A, const Eigen::MatrixXd& D,
                         const Eigen::MatrixXd& V) {
  const double r = (A * V + V * A.transpose() + D).norm();
  const double scale = A.norm() * V.norm() + D.norm();
  return scale > 0.0 ? r / scale : r;
}

}  // namespace

LyapunovSolution solve_lyapunov(const Eigen::MatrixXd& A, const Eigen::MatrixXd& D) {
  const Eigen::Index n = A.rows();
  if (A.cols() != n || D.rows() != n || D.cols() != n) {
    throw ConfigError("solve_lyapunov: A and D must be square of equal size");
  }
  const auto stability = is_stable(A);
  if (!stability.stable) {
    std::ostringstream msg;
    msg << "no steady state: drift matrix spectral abscissa " << stability.abscissa;
    throw InstabilityError("lyapunov", msg.str());
  }

  // Unknowns V(i,j), i <= j, packed row-wise.
  const Eigen::Index m = n * (n + 1) / 2;
  Eigen::MatrixXi index(n, n);
  for (Eigen::Index i = 0, k = 0; i < n; ++i) {
    for (Eigen::Index j = i; j < n; ++j, ++k) index(i, j) = index(j, i) = static_cast<int>(k);
  }
  Eigen::MatrixXd M = Eigen::MatrixXd::Zero(m, m);
  Eigen::VectorXd rhs(m);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = i; j < n; ++j) {
      const int row = index(i, j);
      for (Eigen::Index k = 0; k < n; ++k) {
        M(row, index(k, j)) += A(i, k);  // (A V)_ij
        M(row, index(i, k)) += A(j, k);  // (V A^T)_ij
      }
      rhs(row) = -0.5 * (D(i, j) + D(j, i));
    }
  }

  Eigen::PartialPivLU<Eigen::MatrixXd> lu(M);
  Eigen::VectorXd x = lu.solve(rhs);
  x += lu.solve(rhs - M * x);  // one step of iterative refinement

  LyapunovSolution sol;
  sol.rcond = lu.rcond();
  sol.V.resize(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) sol.V(i, j) = x(index(i, j));
  }
  sol.relative_residual = relative_residual(A, D, sol.V);
  if (sol.rcond < 1e-12) {
    std::ostringstream msg;
    msg << "ill-conditioned Lyapunov system, rcond = " << sol.rcond;
    sol.warnings.push_back(msg.str());
  }
  if (sol.relative_residual > 1e-10) {
    std::ostringstream msg;
    msg << "Lyapunov residual " << sol.relative_residual << " exceeds 1e-10";
    sol.warnings.push_back(msg.str());
  }
  return sol;
}

Eigen::MatrixXd solve_lyapunov_schur(const Eigen::MatrixXd& A, const Eigen::MatrixXd& D) {
  const Eigen::Index n = A.rows();
  Eigen::ComplexSchur<Eigen::MatrixXcd> schur(A.cast<std::complex<double>>());
  if (schur.info() != Eigen::Success) {
    throw NumericalError("lyapunov", "Schur decomposition failed");
  }
  const Eigen::MatrixXcd& T = schur.matrixT();
  const Eigen::MatrixXcd& U = schur.matrixU();
  const Eigen::MatrixXcd C = U.adjoint() * D.cast<std::complex<double>>() * U;

  // T Y + Y T^H = -C, solved column by column from the last one.
  Eigen::MatrixXcd Y = Eigen::MatrixXcd::Zero(n, n);
  for (Eigen::Index j = n - 1; j >= 0; --j) {
    Eigen::VectorXcd b = -C.col(j);
    for (Eigen::Index k = j + 1; k < n; ++k) b -= std::conj(T(j, k)) * Y.col(k);
    Eigen::MatrixXcd L = T;
    L.diagonal().array() += std::conj(T(j, j));
    Y.col(j) = L.triangularView<Eigen::Upper>().solve(b);
  }
  Eigen::MatrixXd V = (U * Y * U.adjoint()).real();
  const double asym = (V - V.transpose()).norm() / std::max(V.norm(), 1e-300);
  if (asym > 1e-8) {
    throw NumericalError("lyapunov", "Schur solution asymmetric beyond 1e-8");
  }
  return 0.5 * (V + V.transpose());
}

CovMatrix steady_covariance(const LinearModel& model) {
  if (!model.stable) {
    throw InstabilityError("lyapunov", "no steady state: drift matrix is unstable");
  }
  auto sol = solve_lyapunov(model.A, model.D);
  CovMatrix cov;
  cov.V = std::move(sol.V);
  cov.modes.assign(kModeOrder.begin(), kModeOrder.end());
  return cov;
}

CovMatrix extract_block(const CovMatrix& cov, std::span<const std::string> modes) {
  std::vector<int> rows;
  for (const auto& label : modes) {
    const int k = cov.index_of(label);
    rows.push_back(2 * k);
    rows.push_back(2 * k + 1);
  }
  CovMatrix out;
  out.modes.assign(modes.begin(), modes.end());
  const auto sz = static_cast<Eigen::Index>(rows.size());
  out.V.resize(sz, sz);
  for (Eigen::Index i = 0; i < sz; ++i) {
    for (Eigen::Index j = 0; j < sz; ++j) out.V(i, j) = cov.V(rows[i], rows[j]);
  }
  return out;
}

CovMatrix extract_block(const CovMatrix& cov, std::initializer_list<std::string> modes) {
  return extract_block(cov, std::span<const std::string>(modes.begin(), modes.size()));
}

}  // namespace cmm
