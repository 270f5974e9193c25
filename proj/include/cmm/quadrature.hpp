#pragma once

// Globally adaptive 7/15-point Gauss-Kronrod quadrature for scalar or
// fixed-size Eigen-valued integrands. Nodes and weights come from Boost.Math;
// the subdivision loop is here because Boost's adaptive driver is scalar-only.

#include <algorithm>
#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>
#include <queue>
#include <type_traits>
#include <vector>

namespace cmm::quadrature {

template <class T>
struct Result {
  T value;
  double error = 0.0;  // sum of per-interval |K15 - G7| (max-abs entry)
  int evaluations = 0;
  int intervals = 0;
  bool converged = false;
};

namespace detail {

template <class T>
double max_abs(const T& v) {
  if constexpr (std::is_arithmetic_v<T>) {
    return std::abs(v);
  } else {
    return v.cwiseAbs().maxCoeff();
  }
}

template <class T>
struct Piece {
  double a = 0.0;
  double b = 0.0;
  T value;
  double error = 0.0;
  bool operator<(const Piece& o) const { return error < o.error; }
};

template <class T, class F>
Piece<T> kronrod(F& f, double a, double b) {
  using GK = boost::math::quadrature::gauss_kronrod<double, 15>;
  using G = boost::math::quadrature::gauss<double, 7>;
  const auto& x = GK::abscissa();
  const auto& wk = GK::weights();
  const auto& wg = G::weights();
  const double c = 0.5 * (a + b);
  const double h = 0.5 * (b - a);
  const T f0 = f(c);
  T k = wk[0] * f0;
  T g = wg[0] * f0;
  for (std::size_t i = 1; i < x.size(); ++i) {
    const T fsum = f(c - h * x[i]) + f(c + h * x[i]);
    k += wk[i] * fsum;
    if (i % 2 == 0) g += wg[i / 2] * fsum;  // Gauss nodes sit at even Kronrod indices
  }
  Piece<T> p{a, b, T(h * k), 0.0};
  p.error = max_abs(T(h * (k - g)));
  return p;
}

}  // namespace detail

/// Integrates f over [breaks.front(), breaks.back()], starting from the given
/// partition and bisecting the interval with the largest error estimate until
/// the summed estimate drops below abs_tol or max_intervals is reached. The
/// final sum runs in ascending interval order, so the result depends only on
/// the inputs.
template <class T, class F>
Result<T> integrate(F f, std::vector<double> breaks, double abs_tol, int max_intervals = 50000) {
  std::sort(breaks.begin(), breaks.end());
  breaks.erase(std::unique(breaks.begin(), breaks.end()), breaks.end());
  std::priority_queue<detail::Piece<T>> queue;
  Result<T> out;
  double total_error = 0.0;
  for (std::size_t i = 0; i + 1 < breaks.size(); ++i) {
    auto p = detail::kronrod<T>(f, breaks[i], breaks[i + 1]);
    out.evaluations += 15;
    total_error += p.error;
    queue.push(std::move(p));
  }
  while (total_error > abs_tol && static_cast<int>(queue.size()) < max_intervals) {
    auto worst = queue.top();
    queue.pop();
    const double mid = 0.5 * (worst.a + worst.b);
    if (!(mid > worst.a && mid < worst.b)) {
      queue.push(std::move(worst));
      break;  // interval cannot be split further in double precision
    }
    auto left = detail::kronrod<T>(f, worst.a, mid);
    auto right = detail::kronrod<T>(f, mid, worst.b);
    out.evaluations += 30;
    total_error += left.error + right.error - worst.error;
    queue.push(std::move(left));
    queue.push(std::move(right));
  }
  std::vector<detail::Piece<T>> pieces;
  pieces.reserve(queue.size());
  while (!queue.empty()) {
    pieces.push_back(queue.top());
    queue.pop();
  }
  std::sort(pieces.begin(), pieces.end(),
            [](const auto& l, const auto& r) { return l.a < r.a; });
  out.value = pieces.front().value;
  out.error = pieces.front().error;
  for (std::size_t i = 1; i < pieces.size(); ++i) {
    out.value += pieces[i].value;
    out.error += pieces[i].error;
  }
  out.intervals = static_cast<int>(pieces.size());
  out.converged = out.error <= abs_tol;
  return out;
}

}  // namespace cmm::quadrature
