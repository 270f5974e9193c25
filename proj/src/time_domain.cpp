#include "cmm/time_domain.hpp"

#include <algorithm>
#include <boost/numeric/odeint.hpp>
#include <cmath>
#include <numbers>
#include <ostream>
#include <sstream>

#include "cmm/constants.hpp"
#include "cmm/error.hpp"
#include "cmm/steady_state.hpp"
#include "cmm/table.hpp"

namespace cmm {

namespace {

using State = std::array<double, 8>;  // Re/Im a_cw, Re/Im a_ccw, Re/Im m, q, p
using cplx = std::complex<double>;
constexpr cplx kI{0.0, 1.0};

ClassicalState unpack(const State& s) {
  return {{s[0], s[1]}, {s[2], s[3]}, {s[4], s[5]}, s[6], s[7]};
}

State pack(const ClassicalState& c) {
  return {c.a_cw.real(), c.a_cw.imag(), c.a_ccw.real(), c.a_ccw.imag(),
          c.m.real(),    c.m.imag(),    c.q,            c.p};
}

// State in units of c (a, m, q, p); gm is g_m / c, so c = g_m makes the
// equations depend on g_m and E only through c E.
struct MeanFieldRhs {
  double ka, km, gb, wb, g1, g2, J, da, dm, gm, e_cw, e_ccw;
  long* counter;

  void operator()(const State& s, State& ds, double /*t*/) const {
    ++*counter;
    const cplx a1{s[0], s[1]};
    const cplx a2{s[2], s[3]};
    const cplx m{s[4], s[5]};
    const double q = s[6];
    const double p = s[7];
    const cplx da1 = -(kI * da + ka) * a1 - kI * J * a2 - kI * g1 * m + e_cw;
    const cplx da2 = -(kI * da + ka) * a2 - kI * J * a1 - kI * g2 * m + e_ccw;
    const cplx dmm = -(kI * dm + km) * m - kI * gm * m * q - kI * g1 * a1 - kI * g2 * a2;
    ds[0] = da1.real();
    ds[1] = da1.imag();
    ds[2] = da2.real();
    ds[3] = da2.imag();
    ds[4] = dmm.real();
    ds[5] = dmm.imag();
    ds[6] = wb * p;
    ds[7] = -wb * q - gb * p - gm * std::norm(m);
  }
};

}  // namespace

double default_horizon(const SystemParams& p) {
  double slowest = std::min(p.kappa_a(), p.kappa_m);
  if (0.5 * p.gamma_b >= 0.01 * slowest) slowest = std::min(slowest, 0.5 * p.gamma_b);
  return 5.0 / slowest + 200.0 * 2.0 * std::numbers::pi / p.omega_b;
}

Trajectory integrate_classical(const SystemParams& params, const ClassicalDrive& drive,
                               const IntegrationOptions& options) {
  namespace odeint = boost::numeric::odeint;
  if (!(options.t_end > 0.0) || !std::isfinite(options.t_end)) {
    throw ConfigError("integrate_classical: t_end must be positive");
  }
  const double period = 2.0 * std::numbers::pi / params.omega_b;
  const int samples =
      options.samples > 1 ? options.samples
                          : std::max(200, static_cast<int>(std::ceil(20.0 * options.t_end / period)) + 1);

  Trajectory traj;
  traj.stats.rel_tol = options.rel_tol;
  traj.stats.abs_tol = options.abs_tol;
  const bool cw = params.drive_port == DrivePort::CW;
  const double c = drive.g_m > 0.0 ? drive.g_m : 1.0;
  const double gm = drive.g_m > 0.0 ? 1.0 : 0.0;
  const MeanFieldRhs rhs{params.kappa_a(), params.kappa_m, params.gamma_b, params.omega_b,
                         params.g_cw,      params.g_ccw,   params.J,       drive.delta_a,
                         drive.delta_m,    gm,             cw ? c * drive.E : 0.0,
                         cw ? 0.0 : c * drive.E, &traj.stats.rhs_evaluations};
  auto unscale = [c](const State& s) {
    State u;
    for (std::size_t i = 0; i < u.size(); ++i) u[i] = s[i] / c;
    return unpack(u);
  };

  std::vector<double> times(samples);
  for (int i = 0; i < samples; ++i) times[i] = options.t_end * i / (samples - 1);
  traj.t.reserve(samples);
  traj.x.reserve(samples);

  State x = pack(options.initial);
  for (double& v : x) v *= c;
  auto stepper = odeint::make_dense_output(options.abs_tol, options.rel_tol,
                                           odeint::runge_kutta_dopri5<State>());
  try {
    odeint::integrate_times(stepper, rhs, x, times.begin(), times.end(), 1e-3 * period,
                            [&](const State& s, double t) {
                              traj.t.push_back(t);
                              traj.x.push_back(unscale(s));
                            },
                            odeint::max_step_checker(100000));
  } catch (const std::exception& e) {
    std::ostringstream msg;
    msg << "integration failed at t = " << (traj.t.empty() ? 0.0 : traj.t.back()) << " s after "
        << traj.stats.rhs_evaluations << " RHS evaluations: " << e.what();
    throw NumericalError("time_domain", msg.str());
  }
  for (std::size_t i = 0; i < traj.x.size(); ++i) {
    if (!std::isfinite(std::abs(traj.x[i].m)) || !std::isfinite(traj.x[i].q) ||
        !std::isfinite(std::abs(traj.x[i].a_cw)) || !std::isfinite(std::abs(traj.x[i].a_ccw))) {
      std::ostringstream msg;
      msg << "non-finite state at t = " << traj.t[i] << " s";
      throw NumericalError("time_domain", msg.str());
    }
  }
  return traj;
}

std::string to_string(Attractor attractor) {
  return attractor == Attractor::Steady ? "steady" : "oscillatory";
}

AttractorInfo classify_attractor(const Trajectory& traj, double omega_b, double threshold) {
  if (traj.t.size() < 2) throw NumericalError("time_domain", "trajectory too short to classify");
  const double t_end = traj.t.back();
  const double t_start = 0.8 * t_end;
  const double period = 2.0 * std::numbers::pi / omega_b;
  if (t_end - t_start < 10.0 * period) {
    std::ostringstream msg;
    msg << "inconclusive: analysis window spans " << (t_end - t_start) / period
        << " mechanical periods, at least 10 required";
    throw NumericalError("time_domain", msg.str());
  }
  std::vector<double> amp;
  double t_first = t_end;
  for (std::size_t i = 0; i < traj.t.size(); ++i) {
    if (traj.t[i] >= t_start) {
      t_first = std::min(t_first, traj.t[i]);
      amp.push_back(std::abs(traj.x[i].m));
    }
  }
  AttractorInfo info;
  info.window_samples = static_cast<int>(amp.size());
  const auto [lo, hi] = std::minmax_element(amp.begin(), amp.end());
  double mean = 0.0;
  for (double a : amp) mean += a;
  mean /= static_cast<double>(amp.size());
  info.mean_abs_m = mean;
  info.relative_peak_to_peak = mean > 0.0 ? (*hi - *lo) / mean : 0.0;
  info.kind = info.relative_peak_to_peak < threshold ? Attractor::Steady : Attractor::Oscillatory;

  // Dominant line of the window spectrum, diagnostic only.
  const auto n = amp.size();
  const double dt = n > 1 ? (t_end - t_first) / static_cast<double>(n - 1) : 0.0;
  const double duration = static_cast<double>(n) * dt;
  double best = 0.0;
  for (std::size_t k = 1; k <= n / 2; ++k) {
    double re = 0.0;
    double im = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      const double phase = 2.0 * std::numbers::pi * static_cast<double>(k * j % n) / n;
      re += (amp[j] - mean) * std::cos(phase);
      im -= (amp[j] - mean) * std::sin(phase);
    }
    const double power = re * re + im * im;
    if (power > best) {
      best = power;
      info.dominant_frequency = 2.0 * std::numbers::pi * k / duration;
    }
  }
  return info;
}

std::optional<ClassicalDrive> drive_for_coupling(const SystemParams& params, double delta_a,
                                                 double delta_m_eff, double target, double g_m,
                                                 Variant variant) {
  const MeanResponse r = response(params, delta_a, delta_m_eff, variant);
  if (std::abs(r.m) == 0.0 || !(g_m > 0.0)) return std::nullopt;
  ClassicalDrive d;
  d.delta_a = delta_a;
  d.g_m = g_m;
  d.E = target / (std::sqrt(2.0) * g_m * std::abs(r.m));
  // delta_m_eff = delta_m + g_m q with q = -g_m |m|^2 / omega_b and |G_m| = sqrt(2) g_m |m|.
  d.delta_m = delta_m_eff + target * target / (2.0 * params.omega_b);
  return d;
}

CombThreshold comb_threshold(const SystemParams& params, const Detunings& det, Variant variant,
                             const CombOptions& options) {
  using constants::angular;
  const double cap = options.cap > 0.0 ? options.cap : angular(30e6);
  const double step = options.scan_step > 0.0 ? options.scan_step : angular(1e6);
  const double resolution = options.resolution > 0.0 ? options.resolution : angular(0.05e6);
  const double t_end = options.t_end > 0.0 ? options.t_end : default_horizon(params);

  CombThreshold out;
  out.g_m = options.g_m.value_or(single_magnon_coupling(params));
  if (!(out.g_m > 0.0)) throw ConfigError("comb threshold requires g_m > 0");

  if (!drive_for_coupling(params, det.delta_a, det.delta_m_eff, step, out.g_m, variant)) {
    out.note = "driven port does not couple to the magnon; no threshold below cap";
    return out;
  }

  auto probe = [&](double target) {
    CombProbe pr;
    pr.target = target;
    const auto drive = *drive_for_coupling(params, det.delta_a, det.delta_m_eff, target, out.g_m,
                                           variant);
    std::optional<Trajectory> traj;
    try {
      traj = integrate_classical(params, drive, IntegrationOptions{t_end});
    } catch (const NumericalError&) {
      pr.integration_failed = true;  // runaway growth; counted as not settling
      pr.attractor.kind = Attractor::Oscillatory;
    }
    if (traj) {
      // An inconclusive window is a configuration problem, not an oscillation.
      pr.attractor = classify_attractor(*traj, params.omega_b);
      pr.late_coupling = std::sqrt(2.0) * out.g_m * pr.attractor.mean_abs_m;
    }
    out.probes.push_back(pr);
    return pr;
  };

  double lo = 0.0;
  double hi = 0.0;
  bool bracketed = false;
  for (double g = step; g <= cap + 0.5 * step; g += step) {
    const double target = std::min(g, cap);
    const auto pr = probe(target);
    if (pr.attractor.kind == Attractor::Oscillatory) {
      hi = target;
      bracketed = true;
      break;
    }
    lo = target;
    out.late_coupling_lower = pr.late_coupling;
  }
  if (!bracketed) {
    out.lower = lo;
    out.upper = cap;
    out.note = "no oscillation found below cap";
    return out;
  }
  while (hi - lo > resolution) {
    const double mid = 0.5 * (lo + hi);
    const auto pr = probe(mid);
    if (pr.attractor.kind == Attractor::Steady) {
      lo = mid;
      out.late_coupling_lower = pr.late_coupling;
    } else {
      hi = mid;
    }
  }
  out.found = true;
  out.lower = lo;
  out.upper = hi;
  out.coupling = 0.5 * (lo + hi);
  out.drive_at_threshold =
      drive_for_coupling(params, det.delta_a, det.delta_m_eff, out.coupling, out.g_m, variant)->E;
  return out;
}

void write_trajectory_csv(std::ostream& os, const Trajectory& traj, double g_m) {
  os << "# t_s: time in s; re_/im_: real and imaginary parts of the dimensionless means\n"
     << "# q, p: mechanical means; abs_m: |<m>|; abs_G_m_hz: sqrt(2) g_m |<m>| / 2pi in Hz\n"
     << "# rhs_evaluations: " << traj.stats.rhs_evaluations << ", rel_tol: "
     << format_number(traj.stats.rel_tol) << ", abs_tol: " << format_number(traj.stats.abs_tol)
     << "\n";
  os << "t_s,re_a_cw,im_a_cw,re_a_ccw,im_a_ccw,re_m,im_m,q,p,abs_m,abs_G_m_hz\n";
  for (std::size_t i = 0; i < traj.t.size(); ++i) {
    const auto& x = traj.x[i];
    const double values[] = {traj.t[i],      x.a_cw.real(), x.a_cw.imag(), x.a_ccw.real(),
                             x.a_ccw.imag(), x.m.real(),    x.m.imag(),    x.q,
                             x.p,            std::abs(x.m),
                             constants::hertz(std::sqrt(2.0) * g_m * std::abs(x.m))};
    for (std::size_t k = 0; k < std::size(values); ++k) {
      if (k) os << ',';
      os << format_number(values[k]);
    }
    os << '\n';
  }
}

}  // namespace cmm
