#include "cmm/steady_state.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <boost/math/tools/roots.hpp>
#include <cmath>
#include <sstream>

#include "cmm/constants.hpp"
#include "cmm/error.hpp"

namespace cmm {

namespace {

constexpr complex kI{0.0, 1.0};

void require_ideal(const SystemParams& p) {
  if (p.J != 0.0 || p.g_ccw != 0.0) {
    throw ConfigError("ideal variant requires J = 0 and g_ccw = 0");
  }
}

/// Cavity amplitudes from the two cavity equations once <m> is known.
std::pair<complex, complex> cavity_from_magnon(const SystemParams& p, double delta_a, complex m) {
  const complex loss = p.kappa_a() + kI * delta_a;
  const double e_cw = p.drive_port == DrivePort::CW ? 1.0 : 0.0;
  const double e_ccw = 1.0 - e_cw;
  // [loss, iJ; iJ, loss] [a_cw; a_ccw] = [e_cw - i g_cw m; e_ccw - i g_ccw m]
  const complex det = loss * loss + p.J * p.J;
  if (std::abs(det) == 0.0) {
    throw NumericalError("steady_state", "singular cavity mean-field block");
  }
  const complex r_cw = e_cw - kI * p.g_cw * m;
  const complex r_ccw = e_ccw - kI * p.g_ccw * m;
  const complex a_cw = (loss * r_cw - kI * p.J * r_ccw) / det;
  const complex a_ccw = (loss * r_ccw - kI * p.J * r_cw) / det;
  return {a_cw, a_ccw};
}

SteadyField assemble(const SystemParams& p, const MeanResponse& r, double drive,
                     double delta_m_eff) {
  SteadyField f;
  f.drive = drive;
  f.a_cw = drive * r.a_cw;
  f.a_ccw = drive * r.a_ccw;
  f.m = drive * r.m;
  f.g_m = single_magnon_coupling(p);
  f.g_m_inferred = !p.g_m.has_value();
  f.G_m = std::sqrt(2.0) * f.g_m * f.m;
  f.q_mean = -f.g_m * std::norm(f.m) / p.omega_b;
  f.delta_m_eff = delta_m_eff;
  f.delta_m = delta_m_eff - f.g_m * f.q_mean;
  return f;
}

}  // namespace

MeanResponse ideal_response(const SystemParams& p, double delta_a, double delta_m_eff) {
  require_ideal(p);
  const complex cav = p.kappa_a() + kI * delta_a;
  const complex mag = p.kappa_m + kI * delta_m_eff;
  if (p.drive_port == DrivePort::CCW) {
    return {0.0, 1.0 / cav, 0.0};
  }
  const complex den = p.g_cw * p.g_cw + cav * mag;
  return {mag / den, 0.0, -kI * p.g_cw / den};
}

MeanResponse imperfect_response(const SystemParams& p, double delta_a, double delta_m_eff) {
  const double ka = p.kappa_a();
  const double km = p.kappa_m;
  const double g1 = p.g_cw;
  const double g2 = p.g_ccw;
  const double J = p.J;
  const double eps1 = g1 * g1 + g2 * g2 + ka * km - delta_a * delta_m_eff;
  const double eps2 = ka * delta_m_eff + km * delta_a;
  const complex den{km * J * J + ka * eps1 - delta_a * eps2,
                    delta_m_eff * J * J - 2.0 * J * g1 * g2 + delta_a * eps1 + ka * eps2};
  if (std::abs(den) == 0.0) {
    throw NumericalError("steady_state", "singular configuration: vanishing mean-field denominator");
  }
  const double g_driven = p.drive_port == DrivePort::CW ? g1 : g2;
  const double g_other = p.drive_port == DrivePort::CW ? g2 : g1;
  const complex num{g_driven * delta_a - g_other * J, -g_driven * ka};
  const complex m = num / den;
  const auto [a_cw, a_ccw] = cavity_from_magnon(p, delta_a, m);
  return {a_cw, a_ccw, m};
}

MeanResponse mean_field_response(const SystemParams& p, double delta_a, double delta_m_eff) {
  Eigen::Matrix3cd M;
  const complex cav = p.kappa_a() + kI * delta_a;
  M << cav, kI * p.J, kI * p.g_cw,
       kI * p.J, cav, kI * p.g_ccw,
       kI * p.g_cw, kI * p.g_ccw, p.kappa_m + kI * delta_m_eff;
  Eigen::Vector3cd rhs = Eigen::Vector3cd::Zero();
  rhs(p.drive_port == DrivePort::CW ? 0 : 1) = 1.0;
  Eigen::FullPivLU<Eigen::Matrix3cd> lu(M);
  if (!lu.isInvertible()) {
    throw NumericalError("steady_state", "singular mean-field system");
  }
  const Eigen::Vector3cd x = lu.solve(rhs);
  return {x(0), x(1), x(2)};
}

MeanResponse response(const SystemParams& p, double delta_a, double delta_m_eff, Variant variant) {
  return variant == Variant::Ideal ? ideal_response(p, delta_a, delta_m_eff)
                                   : imperfect_response(p, delta_a, delta_m_eff);
}

double inferred_single_magnon_coupling() {
  static const double value = [] {
    using constants::angular;
    SystemParams ref;
    ref.omega_b = angular(10e6);
    ref.kappa_a_i = angular(0.2e6);
    ref.kappa_a_e = angular(4.8e6);
    ref.kappa_m = angular(1e6);
    ref.g_cw = angular(8e6);
    const MeanResponse r = ideal_response(ref, -0.76 * ref.omega_b, 0.65 * ref.omega_b);
    const double E = drive_amplitude(0.9, angular(10e9), ref.kappa_a_e);
    return angular(8.5e6) / (std::sqrt(2.0) * std::abs(r.m) * E);
  }();
  return value;
}

double single_magnon_coupling(const SystemParams& p) {
  return p.g_m ? *p.g_m : inferred_single_magnon_coupling();
}

double resolve_drive(const SystemParams& p, const Detunings& det) {
  return std::visit(
      [&](const auto& d) -> double {
        using T = std::decay_t<decltype(d)>;
        if constexpr (std::is_same_v<T, DrivePower>) {
          return drive_amplitude(d.watts, p.omega_0, p.kappa_a_e);
        } else if constexpr (std::is_same_v<T, DriveAmplitude>) {
          return d.rate;
        } else {
          if (p.detuning_mode != DetuningMode::Effective) {
            throw ConfigError("a coupling-calibrated drive needs the effective detuning mode");
          }
          SystemParams ref = p;
          ref.J = 0.0;
          ref.g_ccw = 0.0;
          ref.drive_port = DrivePort::CW;
          const double unit = std::abs(ideal_response(ref, det.delta_a, det.delta_m_eff).m);
          if (d.rate == 0.0) return 0.0;
          if (unit == 0.0) {
            throw ConfigError("coupling-calibrated drive undefined: the CW port does not reach the magnon");
          }
          return d.rate / (std::sqrt(2.0) * single_magnon_coupling(p) * unit);
        }
      },
      p.drive);
}

SteadyField ideal_means(const SystemParams& p, const Detunings& det, double drive) {
  require_ideal(p);
  if (p.detuning_mode == DetuningMode::Physical) {
    return self_consistent_solve(p, det, drive, Variant::Ideal).field;
  }
  return assemble(p, ideal_response(p, det.delta_a, det.delta_m_eff), drive, det.delta_m_eff);
}

SteadyField imperfect_means(const SystemParams& p, const Detunings& det, double drive) {
  if (p.detuning_mode == DetuningMode::Physical) {
    return self_consistent_solve(p, det, drive, Variant::Imperfect).field;
  }
  return assemble(p, imperfect_response(p, det.delta_a, det.delta_m_eff), drive, det.delta_m_eff);
}

SelfConsistentResult self_consistent_solve(const SystemParams& p, const Detunings& det,
                                           double drive, Variant variant) {
  if (!p.g_m) throw ConfigError("self-consistent solve needs g_m");
  const double gm = *p.g_m;
  const double shift_per_x = gm * gm / p.omega_b;  // delta_m_eff = delta_m - shift_per_x * |m|^2
  auto eff_detuning = [&](double x) { return det.delta_m - shift_per_x * x; };
  auto modulus = [&](double x) {
    return drive * drive * std::norm(response(p, det.delta_a, eff_detuning(x), variant).m);
  };

  SelfConsistentResult result;
  if (gm == 0.0 || drive == 0.0) {
    result.iterations = 1;
    result.branches = {modulus(0.0)};
    result.field = assemble(p, response(p, det.delta_a, det.delta_m, variant), drive, det.delta_m);
    return result;
  }

  constexpr double kTol = 1e-12;
  constexpr int kMaxIter = 500;
  double x = modulus(0.0);
  bool converged = false;
  std::vector<double> trace;
  for (int it = 1; it <= kMaxIter; ++it) {
    const double next = 0.5 * x + 0.5 * modulus(x);
    trace.push_back(next);
    result.iterations = it;
    if (std::abs(next - x) <= kTol * std::max(next, 1e-300)) {
      x = next;
      converged = true;
      break;
    }
    x = next;
  }

  // Bracketing scan of h(x) = x - F(x); F is bounded, so h > 0 eventually.
  auto h = [&](double y) { return y - modulus(y); };
  double x_hi = std::max(2.0 * modulus(0.0), 1e-30);
  for (int k = 0; k < 400 && h(x_hi) <= 0.0; ++k) x_hi *= 2.0;
  const double span = shift_per_x * x_hi;
  const int steps = static_cast<int>(
      std::clamp(span / (0.1 * std::min(p.kappa_m, p.kappa_a())), 200.0, 20000.0));
  double prev_x = 0.0;
  double prev_h = h(0.0);
  boost::math::tools::eps_tolerance<double> tol(50);
  for (int i = 1; i <= steps; ++i) {
    const double xi = x_hi * static_cast<double>(i) / steps;
    const double hi = h(xi);
    if (prev_h == 0.0) {
      result.branches.push_back(prev_x);
    } else if ((prev_h < 0.0) != (hi < 0.0) && hi != 0.0) {
      std::uintmax_t max_iter = 200;
      const auto root = boost::math::tools::toms748_solve(h, prev_x, xi, prev_h, hi, tol, max_iter);
      result.branches.push_back(0.5 * (root.first + root.second));
    }
    prev_x = xi;
    prev_h = hi;
  }

  if (result.branches.empty()) {
    if (!converged) {
      std::ostringstream msg;
      msg << "self-consistent shift did not converge after " << kMaxIter << " iterations; last |m|^2:";
      for (std::size_t i = trace.size() > 5 ? trace.size() - 5 : 0; i < trace.size(); ++i) {
        msg << ' ' << trace[i];
      }
      throw NumericalError("steady_state", msg.str());
    }
    result.branches.push_back(x);
  }

  const double lowest = result.branches.front();
  if (!converged || result.multistable() ||
      std::abs(x - lowest) > 1e-9 * std::max(lowest, 1e-300)) {
    result.used_bracketing = true;
    x = lowest;
  }
  const double delta_eff = eff_detuning(x);
  result.field = assemble(p, response(p, det.delta_a, delta_eff, variant), drive, delta_eff);
  result.field.delta_m = det.delta_m;
  return result;
}

SteadyField solve_steady_state(const SystemParams& p, const Detunings& det, Variant variant) {
  const double E = resolve_drive(p, det);
  return variant == Variant::Ideal ? ideal_means(p, det, E) : imperfect_means(p, det, E);
}

}  // namespace cmm
