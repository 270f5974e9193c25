#include "cmm/pipeline.hpp"

#include <atomic>
#include <cmath>
#include <map>
#include <mutex>
#include <sstream>
#include <thread>

#include "cmm/linear_model.hpp"
#include "cmm/lyapunov.hpp"

namespace cmm {

namespace {

Eigen::MatrixXd principal(const Eigen::MatrixXd& V, std::initializer_list<int> modes) {
  std::vector<int> idx;
  for (int m : modes) {
    idx.push_back(2 * m);
    idx.push_back(2 * m + 1);
  }
  const auto n = static_cast<Eigen::Index>(idx.size());
  Eigen::MatrixXd out(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) out(i, j) = V(idx[i], idx[j]);
  }
  return out;
}

double pair_negativity(const Eigen::MatrixXd& V, int a, int b) {
  return log_negativity(Eigen::Matrix4d(principal(V, {a, b})));
}

bool same_scenario_except_port(const Scenario& x, const Scenario& y) {
  const SystemParams& p = x.params;
  const SystemParams& q = y.params;
  const auto drive_equal = [&] {
    if (p.drive.index() != q.drive.index()) return false;
    return std::visit(
        [&](const auto& d) {
          using T = std::decay_t<decltype(d)>;
          const auto& e = std::get<T>(q.drive);
          if constexpr (std::is_same_v<T, DrivePower>) {
            return d.watts == e.watts;
          } else {
            return d.rate == e.rate;
          }
        },
        p.drive);
  };
  return p.omega_a == q.omega_a && p.omega_m == q.omega_m && p.omega_b == q.omega_b &&
         p.omega_0 == q.omega_0 && p.kappa_a_i == q.kappa_a_i && p.kappa_a_e == q.kappa_a_e &&
         p.kappa_m == q.kappa_m && p.gamma_b == q.gamma_b && p.g_cw == q.g_cw &&
         p.g_ccw == q.g_ccw && p.g_m == q.g_m && p.J == q.J && p.temperature == q.temperature &&
         p.detuning_mode == q.detuning_mode && drive_equal() && x.variant == y.variant &&
         x.detunings.delta_a == y.detunings.delta_a &&
         x.detunings.delta_m == y.detunings.delta_m &&
         x.detunings.delta_m_eff == y.detunings.delta_m_eff;
}

}  // namespace

EntReport evaluate_point(const Scenario& scenario, const EvaluateOptions& options) {
  const SystemParams& p = scenario.params;
  require_valid(p);
  EntReport report;
  report.scenario = scenario;
  for (const auto& d : validate(p)) {
    if (d.severity == Severity::Warning) report.warnings.push_back(d.field + ": " + d.message);
  }

  report.steady = solve_steady_state(p, scenario.detunings, scenario.variant);
  if (report.steady.g_m_inferred && p.detuning_mode == DetuningMode::Effective &&
      !std::holds_alternative<CouplingMagnitude>(p.drive)) {
    report.warnings.push_back("g_m not configured; absolute means use the inferred constant");
  }
  const LinearModel model =
      build_linear_model(p, scenario.detunings, report.steady, scenario.variant);
  report.stable = model.stable;
  report.abscissa = model.abscissa;
  if (!model.stable) return report;

  const auto sol = solve_lyapunov(model.A, model.D);
  for (const auto& w : sol.warnings) report.warnings.push_back(w);
  report.lyapunov_residual = sol.relative_residual;
  const Eigen::MatrixXd& V = sol.V;
  report.min_symplectic = symplectic_eigenvalues(V).minCoeff();
  if (report.min_symplectic < 0.5 - 1e-9) {
    std::ostringstream msg;
    msg << "covariance matrix violates the uncertainty principle: min symplectic eigenvalue "
        << report.min_symplectic;
    report.warnings.push_back(msg.str());
  }

  // Mode indices: 0 a_cw, 1 a_ccw, 2 m, 3 b.
  report.E_acw_m = pair_negativity(V, 0, 2);
  report.E_acw_b = pair_negativity(V, 0, 3);
  report.E_accw_m = pair_negativity(V, 1, 2);
  report.E_accw_b = pair_negativity(V, 1, 3);
  report.E_m_b = pair_negativity(V, 2, 3);
  report.E_acw_accw = pair_negativity(V, 0, 1);

  if (options.tripartite) {
    report.R_acw = residual_contangle_min(Eigen::Matrix<double, 6, 6>(principal(V, {0, 2, 3})));
    report.R_accw = residual_contangle_min(Eigen::Matrix<double, 6, 6>(principal(V, {1, 2, 3})));
    for (const auto* r : {&*report.R_acw, &*report.R_accw}) {
      if (r->monogamy_violated) report.warnings.push_back("monogamy violated beyond 1e-9");
      if (r->extra_negative_eigenvalue) {
        report.warnings.push_back(
            "a second symplectic eigenvalue of a transposed CM is below 1/2; only the smallest is used");
      }
    }
  }

  if (options.filter) {
    LinearModel stable_model = model;
    const auto pair = filtered_pair_cm(stable_model, p, *options.filter, options.convention);
    FilteredReport f;
    f.spec = *options.filter;
    f.convention = options.convention;
    const Eigen::Matrix4d V4 = pair.cov.V;
    f.E_N = log_negativity(V4);
    f.fidelity_raw = teleportation_fidelity(V4);
    const auto best = optimal_teleportation_fidelity(V4);
    f.fidelity = best.fidelity;
    f.lo_phase = best.phase;
    f.error_estimate = pair.error_estimate;
    f.bona_fide = pair.bona_fide;
    if (!pair.bona_fide) report.warnings.push_back("filtered CM is not bona fide within 1e-6");
    report.filtered = f;
  }
  return report;
}

double measure(const EntReport& r, std::string_view name) {
  if (name == "E_acw_m") return r.E_acw_m;
  if (name == "E_acw_b") return r.E_acw_b;
  if (name == "E_accw_m") return r.E_accw_m;
  if (name == "E_accw_b") return r.E_accw_b;
  if (name == "E_m_b") return r.E_m_b;
  if (name == "E_acw_accw") return r.E_acw_accw;
  if (name == "R_acw_m_b" || name == "R_accw_m_b") {
    const auto& c = name == "R_acw_m_b" ? r.R_acw : r.R_accw;
    if (!c) throw ConfigError("tripartite measures were not requested");
    return c->r_min;
  }
  throw ConfigError("unknown measure '" + std::string(name) + "'");
}

double nonreciprocity_contrast(const EntReport& cw, const EntReport& ccw, std::string_view name) {
  if (cw.scenario.params.drive_port != DrivePort::CW ||
      ccw.scenario.params.drive_port != DrivePort::CCW) {
    throw ConfigError("contrast needs a CW-drive and a CCW-drive report, in that order");
  }
  if (!same_scenario_except_port(cw.scenario, ccw.scenario)) {
    throw ConfigError("contrast: reports differ in more than the drive port");
  }
  const double a = measure(cw, name);
  const double b = measure(ccw, name);
  if (a + b == 0.0) return 0.0;
  return (a - b) / (a + b);
}

namespace {

const std::map<std::string, AxisSetter>& setters() {
  static const std::map<std::string, AxisSetter> table = {
      {"delta_a", [](Scenario& s, double v) { s.detunings.delta_a = v; }},
      {"delta_m",
       [](Scenario& s, double v) {
         s.detunings.delta_m = v;
         s.detunings.delta_m_eff = v;
       }},
      {"J", [](Scenario& s, double v) { s.params.J = v; }},
      {"chi", [](Scenario& s, double v) { s.params.g_ccw = v * s.params.g_cw; }},
      {"g_cw", [](Scenario& s, double v) { s.params.g_cw = v; }},
      {"g_ccw", [](Scenario& s, double v) { s.params.g_ccw = v; }},
      {"kappa_a_e", [](Scenario& s, double v) { s.params.kappa_a_e = v; }},
      {"kappa_a_i", [](Scenario& s, double v) { s.params.kappa_a_i = v; }},
      {"kappa_m", [](Scenario& s, double v) { s.params.kappa_m = v; }},
      {"gamma_b", [](Scenario& s, double v) { s.params.gamma_b = v; }},
      {"temperature", [](Scenario& s, double v) { s.params.temperature = v; }},
      {"coupling", [](Scenario& s, double v) { s.params.drive = CouplingMagnitude{v}; }},
      {"power", [](Scenario& s, double v) { s.params.drive = DrivePower{v}; }},
      {"amplitude", [](Scenario& s, double v) { s.params.drive = DriveAmplitude{v}; }},
      {"g_m", [](Scenario& s, double v) { s.params.g_m = v; }},
  };
  return table;
}

}  // namespace

bool is_sweepable(const std::string& name) { return setters().count(name) > 0; }

AxisSetter axis_setter(const std::string& name) {
  const auto it = setters().find(name);
  if (it == setters().end()) throw ConfigError("unknown sweep variable '" + name + "'");
  return it->second;
}

double SweepAxis::value(int i) const {
  if (count == 1) return start;
  if (i == count - 1) return stop;
  return start + (stop - start) * static_cast<double>(i) / (count - 1);
}

void validate_sweep(const SweepSpec& spec) {
  if (spec.axes.empty() || spec.axes.size() > 2) {
    throw ConfigError("a sweep needs one or two axes");
  }
  for (const auto& ax : spec.axes) {
    axis_setter(ax.name);
    if (ax.count < 1) throw ConfigError("sweep axis '" + ax.name + "' needs at least one point");
    if (ax.count == 1 && ax.start != ax.stop) {
      throw ConfigError("sweep axis '" + ax.name + "' with one point needs start == stop");
    }
    if (!std::isfinite(ax.start) || !std::isfinite(ax.stop)) {
      throw ConfigError("sweep axis '" + ax.name + "' has a non-finite range");
    }
  }
  if (spec.ports.empty()) throw ConfigError("a sweep needs at least one drive port");
}

std::vector<SweepRow> run_sweep(const Scenario& base, const SweepSpec& spec, int workers) {
  validate_sweep(spec);
  std::vector<AxisSetter> set;
  for (const auto& ax : spec.axes) set.push_back(axis_setter(ax.name));

  std::size_t points = 1;
  for (const auto& ax : spec.axes) points *= static_cast<std::size_t>(ax.count);
  const std::size_t total = points * spec.ports.size();
  std::vector<SweepRow> rows(total);

  auto compute = [&](std::size_t index) {
    SweepRow& row = rows[index];
    const std::size_t point = index / spec.ports.size();
    row.port = spec.ports[index % spec.ports.size()];
    Scenario s = base;
    s.params.drive_port = row.port;
    std::size_t rem = point;
    std::vector<int> idx(spec.axes.size());
    for (std::size_t k = spec.axes.size(); k-- > 0;) {
      idx[k] = static_cast<int>(rem % spec.axes[k].count);
      rem /= spec.axes[k].count;
    }
    for (std::size_t k = 0; k < spec.axes.size(); ++k) {
      const double v = spec.axes[k].value(idx[k]);
      row.coords.push_back(v);
      set[k](s, v);
    }
    try {
      row.report = evaluate_point(s, spec.options);
    } catch (const Error& e) {
      row.error_category = e.category();
      row.error = e.what();
    } catch (const std::exception& e) {
      row.error_category = ErrorCategory::Numerical;
      row.error = e.what();
    }
  };

  const int n_workers =
      std::max(1, std::min<int>(workers, static_cast<int>(std::min<std::size_t>(total, 1024))));
  if (n_workers == 1) {
    for (std::size_t i = 0; i < total; ++i) compute(i);
    return rows;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  pool.reserve(n_workers);
  for (int w = 0; w < n_workers; ++w) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < total; i = next++) compute(i);
    });
  }
  for (auto& t : pool) t.join();
  return rows;
}

}  // namespace cmm
