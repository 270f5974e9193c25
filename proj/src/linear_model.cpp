#include "cmm/linear_model.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>

#include "cmm/constants.hpp"
#include "cmm/error.hpp"

namespace cmm {

Matrix8 build_drift(const SystemParams& p, double da, double dm, std::complex<double> G,
                    Variant variant) {
  if (variant == Variant::Ideal && (p.J != 0.0 || p.g_ccw != 0.0)) {
    throw ConfigError("ideal drift matrix requires J = 0 and g_ccw = 0");
  }
  const double ka = p.kappa_a();
  const double km = p.kappa_m;
  const double g1 = p.g_cw;
  const double g2 = variant == Variant::Ideal ? 0.0 : p.g_ccw;
  const double J = variant == Variant::Ideal ? 0.0 : p.J;
  const double wb = p.omega_b;
  const double gb = p.gamma_b;
  const double re = G.real();
  const double im = G.imag();

  Matrix8 A;
  A <<  -ka,   da,   0.0,  J,    0.0,  g1,   0.0, 0.0,
        -da,  -ka,  -J,    0.0, -g1,   0.0,  0.0, 0.0,
        0.0,   J,   -ka,   da,   0.0,  g2,   0.0, 0.0,
        -J,    0.0, -da,  -ka,  -g2,   0.0,  0.0, 0.0,
        0.0,   g1,   0.0,  g2,  -km,   dm,   im,  0.0,
        -g1,   0.0, -g2,   0.0, -dm,  -km,  -re,  0.0,
        0.0,   0.0,  0.0,  0.0,  0.0,  0.0,  0.0, wb,
        0.0,   0.0,  0.0,  0.0, -re,  -im,  -wb, -gb;
  return A;
}

Matrix8 build_diffusion(const SystemParams& p) {
  const double Na = thermal_occupancy(p.omega_a, p.temperature);
  const double Nm = thermal_occupancy(p.omega_m, p.temperature);
  const double Nb = thermal_occupancy(p.omega_b, p.temperature);
  Matrix8 D = Matrix8::Zero();
  for (int i = 0; i < 4; ++i) D(i, i) = p.kappa_a() * (2.0 * Na + 1.0);
  D(4, 4) = D(5, 5) = p.kappa_m * (2.0 * Nm + 1.0);
  D(7, 7) = p.gamma_b * (2.0 * Nb + 1.0);
  return D;
}

StabilityInfo is_stable(const Eigen::MatrixXd& A) {
  if (!A.allFinite()) throw NumericalError("stability", "drift matrix has non-finite entries");
  Eigen::EigenSolver<Eigen::MatrixXd> solver(A, false);
  if (solver.info() != Eigen::Success) {
    throw NumericalError("stability", "eigenvalue computation failed");
  }
  const double abscissa = solver.eigenvalues().real().maxCoeff();
  const double threshold = -1e-9 * A.norm();
  return {abscissa < threshold, abscissa};
}

LinearModel build_linear_model(const SystemParams& p, const Detunings& det,
                               const SteadyField& steady, Variant variant) {
  LinearModel model;
  model.A = build_drift(p, det.delta_a, steady.delta_m_eff, steady.G_m, variant);
  model.D = build_diffusion(p);
  const auto s = is_stable(model.A);
  model.stable = s.stable;
  model.abscissa = s.abscissa;
  return model;
}

StabilityEdge max_stable_coupling(const SystemParams& p, const Detunings& det, Variant variant,
                                  const StabilityEdgeOptions& opt) {
  using constants::angular;
  StabilityEdge edge;
  edge.cap = opt.cap > 0.0 ? opt.cap : 20.0 * p.omega_b;
  const double resolution = opt.resolution > 0.0 ? opt.resolution : angular(0.01e6);
  const double step = opt.scan_step > 0.0 ? opt.scan_step : angular(0.25e6);
  const std::complex<double> phase = std::polar(1.0, opt.phase);

  auto stable_at = [&](double g) {
    ++edge.evaluations;
    return is_stable(build_drift(p, det.delta_a, det.delta_m_eff, g * phase, variant)).stable;
  };

  if (!stable_at(0.0)) {
    throw InstabilityError("stability", "system is unstable already at G_m = 0");
  }
  double lo = 0.0;
  double hi = 0.0;
  bool bracketed = false;
  for (double g = step; g <= edge.cap + 0.5 * step; g += step) {
    const double probe = std::min(g, edge.cap);
    if (!stable_at(probe)) {
      hi = probe;
      bracketed = true;
      break;
    }
    lo = probe;
  }
  edge.lower = lo;
  if (!bracketed) {
    edge.coupling = edge.cap;
    edge.upper = edge.cap;
    return edge;
  }
  while (hi - lo > resolution) {
    const double mid = 0.5 * (lo + hi);
    (stable_at(mid) ? lo : hi) = mid;
  }
  edge.found = true;
  edge.lower = lo;
  edge.upper = hi;
  edge.coupling = 0.5 * (lo + hi);
  return edge;
}

}  // namespace cmm
