#include "doctest.h"
#include "oracles.hpp"
#include "support.hpp"

#include "cmm/error.hpp"
#include "cmm/lyapunov.hpp"

using namespace cmm;

TEST_CASE("Lyapunov solution agrees with the integral oracle") {
  std::mt19937_64 rng(7);
  double worst = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    const int n = trial % 2 ? 8 : 4 + trial % 5;
    const auto s = test::random_stable(n, rng);
    const auto sol = solve_lyapunov(s.A, s.D);
    worst = std::max(worst, test::rel_diff(sol.V, test::integral_oracle(s.A, s.D)));
  }
  MESSAGE("worst relative deviation from the oracle: " << worst);
  CHECK(worst <= 1e-8);
}

TEST_CASE("packed and Schur solvers agree, residual below 1e-10") {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 100; ++trial) {
    const auto s = test::random_stable(8, rng);
    const auto sol = solve_lyapunov(s.A, s.D);
    CHECK(sol.relative_residual <= 1e-10);
    CHECK(sol.warnings.empty());
    CHECK(test::rel_diff(solve_lyapunov_schur(s.A, s.D), sol.V) <= 1e-9);
    CHECK((sol.V - sol.V.transpose()).norm() == 0.0);
  }
}

TEST_CASE("scalar Lyapunov equation") {
  Eigen::MatrixXd A(1, 1), D(1, 1);
  A << -2.0;
  D << 3.0;
  CHECK(solve_lyapunov(A, D).V(0, 0) == doctest::Approx(0.75).epsilon(1e-15));
}

TEST_CASE("unstable drift is refused") {
  Eigen::MatrixXd A = -Eigen::MatrixXd::Identity(4, 4);
  A(2, 2) = 0.1;
  CHECK_THROWS_AS(solve_lyapunov(A, Eigen::MatrixXd::Identity(4, 4)), InstabilityError);
}

TEST_CASE("block extraction keeps the requested order") {
  CovMatrix cov;
  cov.V = Eigen::MatrixXd::Zero(6, 6);
  for (int i = 0; i < 6; ++i) cov.V(i, i) = i + 1;
  cov.V(0, 4) = cov.V(4, 0) = 0.25;
  cov.modes = {"a", "b", "c"};
  const auto sub = extract_block(cov, {"c", "a"});
  CHECK(sub.modes == std::vector<std::string>{"c", "a"});
  CHECK(sub.V(0, 0) == 5.0);
  CHECK(sub.V(2, 2) == 1.0);
  CHECK(sub.V(0, 2) == 0.25);
  CHECK_THROWS_AS(cov.index_of("z"), ConfigError);
}
