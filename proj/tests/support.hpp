#pragma once

#include <Eigen/Core>
#include <random>

#include "cmm/constants.hpp"
#include "cmm/params.hpp"
#include "cmm/pipeline.hpp"

namespace cmm::test {

using constants::angular;

// Baseline device, magnon-optimal set.
inline SystemParams baseline() {
  SystemParams p;
  p.omega_a = p.omega_m = p.omega_0 = angular(10e9);
  p.omega_b = angular(10e6);
  p.kappa_m = angular(1e6);
  p.kappa_a_i = angular(0.2e6);
  p.kappa_a_e = angular(2.8e6);
  p.gamma_b = angular(100.0);
  p.g_cw = angular(4e6);
  p.temperature = 0.01;
  p.drive = CouplingMagnitude{angular(4e6)};
  return p;
}

inline Scenario magnon_optimal() {
  Scenario s;
  s.params = baseline();
  s.detunings = Detunings::effective(-0.72 * s.params.omega_b, 0.76 * s.params.omega_b);
  s.variant = Variant::Ideal;
  return s;
}

inline Scenario phonon_optimal() {
  Scenario s;
  s.params = baseline();
  s.params.kappa_a_e = angular(4.8e6);
  s.params.g_cw = angular(8e6);
  s.params.drive = CouplingMagnitude{angular(2.5e6)};
  s.detunings = Detunings::effective(-0.76 * s.params.omega_b, 0.65 * s.params.omega_b);
  s.variant = Variant::Ideal;
  return s;
}

inline double rel_diff(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
  return (a - b).norm() / std::max(b.norm(), 1e-300);
}

// Random symplectic matrix: product of local rotations, squeezers and
// two-mode beam splitters on n modes.
inline Eigen::MatrixXd random_symplectic(int n, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> angle(0.0, 6.283185307179586);
  std::uniform_real_distribution<double> squeeze(-0.8, 0.8);
  Eigen::MatrixXd S = Eigen::MatrixXd::Identity(2 * n, 2 * n);
  for (int layer = 0; layer < 3; ++layer) {
    for (int k = 0; k < n; ++k) {
      Eigen::MatrixXd L = Eigen::MatrixXd::Identity(2 * n, 2 * n);
      const double th = angle(rng);
      const double r = squeeze(rng);
      Eigen::Matrix2d R;
      R << std::cos(th), -std::sin(th), std::sin(th), std::cos(th);
      L.block<2, 2>(2 * k, 2 * k) = Eigen::Vector2d(std::exp(-r), std::exp(r)).asDiagonal() * R;
      S = L * S;
    }
    for (int k = 0; k + 1 < n; ++k) {
      Eigen::MatrixXd B = Eigen::MatrixXd::Identity(2 * n, 2 * n);
      const double th = angle(rng);
      const double c = std::cos(th), s = std::sin(th);
      B.block<2, 2>(2 * k, 2 * k) = c * Eigen::Matrix2d::Identity();
      B.block<2, 2>(2 * k + 2, 2 * k + 2) = c * Eigen::Matrix2d::Identity();
      B.block<2, 2>(2 * k, 2 * k + 2) = s * Eigen::Matrix2d::Identity();
      B.block<2, 2>(2 * k + 2, 2 * k) = -s * Eigen::Matrix2d::Identity();
      S = B * S;
    }
  }
  return S;
}

// Two-mode squeezed vacuum, vacuum variance 1/2.
inline Eigen::Matrix4d tmsv(double r) {
  const double c = 0.5 * std::cosh(2 * r), s = 0.5 * std::sinh(2 * r);
  Eigen::Matrix4d V;
  V << c, 0, s, 0,
       0, c, 0, -s,
       s, 0, c, 0,
       0, -s, 0, c;
  return V;
}

}  // namespace cmm::test
