#include "doctest.h"
#include "support.hpp"

#include <Eigen/LU>
#include <algorithm>
#include <cmath>
#include <random>

#include "cmm/error.hpp"
#include "cmm/measures.hpp"

using namespace cmm;

TEST_CASE("two-mode squeezed vacuum: E_N = 2r") {
  for (double r : {0.1, 0.5, 1.0}) {
    CHECK(std::abs(log_negativity(test::tmsv(r)) - 2 * r) <= 1e-9);
    CHECK(std::abs(partial_transpose_log_negativity(test::tmsv(r), 0) - 2 * r) <= 1e-9);
    CHECK(std::abs(partial_transpose_log_negativity(test::tmsv(r), 1) - 2 * r) <= 1e-9);
  }
  CHECK(log_negativity(0.5 * Eigen::Matrix4d::Identity()) == 0.0);
}

TEST_CASE("pure Gaussian states have all symplectic eigenvalues 1/2") {
  std::mt19937_64 rng(3);
  for (int n = 1; n <= 4; ++n) {
    for (int trial = 0; trial < 20; ++trial) {
      const Eigen::MatrixXd S = test::random_symplectic(n, rng);
      const Eigen::MatrixXd V = 0.5 * S * S.transpose();
      const Eigen::VectorXd nu = symplectic_eigenvalues(V);
      CHECK(nu.size() == n);
      CHECK((nu.array() - 0.5).abs().maxCoeff() <= 1e-9);
      CHECK(is_bona_fide(V));
    }
  }
}

TEST_CASE("thermal symplectic spectrum is the occupancy ladder") {
  Eigen::MatrixXd V = Eigen::MatrixXd::Zero(6, 6);
  const double nu[] = {0.5, 2.0, 7.25};
  for (int k = 0; k < 3; ++k) V(2 * k, 2 * k) = V(2 * k + 1, 2 * k + 1) = nu[k];
  std::mt19937_64 rng(5);
  const Eigen::MatrixXd S = test::random_symplectic(3, rng);
  const Eigen::VectorXd got = symplectic_eigenvalues(S * V * S.transpose());
  for (int k = 0; k < 3; ++k) CHECK(got(k) == doctest::Approx(nu[k]).epsilon(1e-10));
}

TEST_CASE("log negativity is invariant under local symplectic maps") {
  std::mt19937_64 rng(9);
  for (int trial = 0; trial < 50; ++trial) {
    Eigen::Matrix4d V = test::tmsv(0.3 + 0.01 * trial);
    V += 0.05 * Eigen::Matrix4d::Identity();  // thermal admixture
    const double ref = log_negativity(V);
    Eigen::Matrix4d L = Eigen::Matrix4d::Zero();
    L.block<2, 2>(0, 0) = test::random_symplectic(1, rng);
    L.block<2, 2>(2, 2) = test::random_symplectic(1, rng);
    CHECK(log_negativity(L * V * L.transpose()) == doctest::Approx(ref).epsilon(1e-9));
  }
}

TEST_CASE("log negativity is symmetric under mode exchange") {
  Eigen::Matrix4d V = test::tmsv(0.4);
  V(0, 0) += 0.3;
  V(3, 3) += 0.1;
  Eigen::Matrix4d P = Eigen::Matrix4d::Zero();
  P(0, 2) = P(1, 3) = P(2, 0) = P(3, 1) = 1.0;
  CHECK(log_negativity(P * V * P.transpose()) == doctest::Approx(log_negativity(V)).epsilon(1e-12));
}

TEST_CASE("added noise never increases entanglement") {
  const Eigen::Matrix4d V = test::tmsv(0.6);
  double prev = log_negativity(V);
  for (double eps = 0.02; eps < 1.0; eps += 0.02) {
    const double e = log_negativity(V + eps * Eigen::Matrix4d::Identity());
    CHECK(e <= prev + 1e-15);
    prev = e;
  }
  CHECK(prev == 0.0);
}

TEST_CASE("closed form and general partial transpose agree") {
  std::mt19937_64 rng(13);
  for (int trial = 0; trial < 100; ++trial) {
    const Eigen::MatrixXd S = test::random_symplectic(2, rng);
    Eigen::Matrix4d V = 0.5 * S * S.transpose();
    V += 0.01 * (trial % 7) * Eigen::Matrix4d::Identity();
    const double sigma = V.topLeftCorner<2, 2>().determinant() +
                         V.bottomRightCorner<2, 2>().determinant() -
                         2.0 * V.topRightCorner<2, 2>().determinant();
    const double eta_sq = 0.5 * (sigma - std::sqrt(sigma * sigma - 4.0 * V.determinant()));
    const double closed = std::max(0.0, -std::log(2.0 * std::sqrt(eta_sq)));
    CHECK(log_negativity(V) == doctest::Approx(closed).epsilon(1e-7).scale(1.0));
    CHECK(log_negativity(V) ==
          doctest::Approx(partial_transpose_log_negativity(V, 1)).epsilon(1e-9).scale(1.0));
  }
}

TEST_CASE("nearly separable states report exactly zero") {
  const Eigen::Matrix4d V = test::tmsv(1e-14);
  CHECK(log_negativity(V) == 0.0);
  CHECK(log_negativity(test::tmsv(1e-6)) == doctest::Approx(2e-6).epsilon(1e-6));
}

TEST_CASE("non-positive matrices are rejected") {
  Eigen::Matrix4d V = Eigen::Matrix4d::Identity();
  V(1, 1) = -1.0;
  CHECK_THROWS_AS(symplectic_eigenvalues(V), ConfigError);
}

TEST_CASE("product vacuum: fidelity 1/2, no entanglement") {
  const Eigen::Matrix4d vac = 0.5 * Eigen::Matrix4d::Identity();
  CHECK(std::abs(teleportation_fidelity(vac) - 0.5) <= 1e-12);
  CHECK(std::abs(optimal_teleportation_fidelity(vac).fidelity - 0.5) <= 1e-12);
  Eigen::Matrix<double, 6, 6> V3 = 0.5 * Eigen::Matrix<double, 6, 6>::Identity();
  const auto c = residual_contangle_min(V3);
  CHECK(c.r_min == 0.0);
  CHECK_FALSE(c.monogamy_violated);
}

TEST_CASE("teleportation with a two-mode squeezed resource") {
  // Ideal resource with the correlation signs of W: F = 1 / (1 + e^{-2r}).
  for (double r : {0.2, 0.7, 1.5}) {
    Eigen::Matrix4d V = test::tmsv(r);
    V.block<2, 2>(0, 2) *= -1.0;
    V.block<2, 2>(2, 0) *= -1.0;
    CHECK(teleportation_fidelity(V) == doctest::Approx(1.0 / (1.0 + std::exp(-2 * r))).epsilon(1e-12));
  }
  // Rotating the first mode only lowers the raw fidelity; the optimiser recovers it.
  Eigen::Matrix4d V = test::tmsv(0.7);
  V.block<2, 2>(0, 2) *= -1.0;
  V.block<2, 2>(2, 0) *= -1.0;
  Eigen::Matrix4d R = Eigen::Matrix4d::Identity();
  R.block<2, 2>(0, 0) = rotation(1.1);
  const Eigen::Matrix4d W = R * V * R.transpose();
  const double best = 1.0 / (1.0 + std::exp(-1.4));
  CHECK(teleportation_fidelity(W) < best - 1e-3);
  CHECK(optimal_teleportation_fidelity(W).fidelity == doctest::Approx(best).epsilon(1e-9));
}

TEST_CASE("residual contangle of a GHZ-like pure state is positive and monogamous") {
  std::mt19937_64 rng(17);
  // Two-mode squeezer on (0,1) followed by a beam splitter on (1,2).
  const double r = 0.6, th = 0.7;
  Eigen::Matrix<double, 6, 6> V = Eigen::Matrix<double, 6, 6>::Identity() * 0.5;
  V.block<4, 4>(0, 0) = test::tmsv(r);
  Eigen::Matrix<double, 6, 6> B = Eigen::Matrix<double, 6, 6>::Identity();
  B.block<2, 2>(2, 2) = B.block<2, 2>(4, 4) = std::cos(th) * Eigen::Matrix2d::Identity();
  B.block<2, 2>(2, 4) = std::sin(th) * Eigen::Matrix2d::Identity();
  B.block<2, 2>(4, 2) = -std::sin(th) * Eigen::Matrix2d::Identity();
  V = B * V * B.transpose();
  const auto c = residual_contangle_min(V);
  CHECK(c.r_min > 0.0);
  CHECK_FALSE(c.monogamy_violated);
  for (double res : c.residual) CHECK(res >= -1e-9);
  // Pure state: E_{0|12} equals the squeezing of the original pair.
  CHECK(c.one_vs_two[0] == doctest::Approx(2 * r).epsilon(1e-9));
  (void)rng;
}

TEST_CASE("mixed steady states can violate squared log-negativity monogamy") {
  // Steady state of the chiral system at delta_a = -1.1, delta_m = 1.74 omega_b
  // (modes a_cw, m, b). Reference values from an independent eigenvalue computation.
  Eigen::Matrix<double, 6, 6> V;
  V << 0.50904660275940961, 0.011119359033816731, -0.0066259418783144106, 0.037363189412553142, 0.1323292366605153, 0.027100264107926781,
      0.011119359033816731, 0.51636421748028216, 0.018305074232784383, 0.030176537154810112, 0.094193021808546842, -0.11187545962546649,
      -0.0066259418783144106, 0.018305074232784383, 0.51866828075205518, -7.3326976773486376e-05, 0.013571985396340714, -0.043915680715923756,
      0.037363189412553142, 0.030176537154810112, -7.3326976773486376e-05, 0.57514299621656639, 0.29052707719907334, 0.0080979293866596108,
      0.1323292366605153, 0.094193021808546842, 0.013571985396340714, 0.29052707719907334, 1.2684447935183647, 0,
      0.027100264107926781, -0.11187545962546649, -0.043915680715923756, 0.0080979293866596108, 0, 1.1533566521115213;
  CHECK(is_bona_fide(V, 0.0));
  const auto c = residual_contangle_min(V);
  CHECK(c.one_vs_two[0] == doctest::Approx(0.030194356515603524).epsilon(1e-9));
  CHECK(c.pairwise[0] == doctest::Approx(0.015571545391259716).epsilon(1e-9));
  CHECK(c.pairwise[1] == doctest::Approx(0.027271767328698147).epsilon(1e-9));
  CHECK(c.pairwise[2] == 0.0);
  CHECK(c.residual[0] == doctest::Approx(-7.452315371134048e-05).epsilon(1e-7));
  CHECK(c.residual[1] == doctest::Approx(3.149911732196805e-04).epsilon(1e-7));
  CHECK(c.residual[2] == doctest::Approx(5.312676251945854e-04).epsilon(1e-7));
  CHECK(c.monogamy_violated);
  CHECK(c.r_min == 0.0);
}
