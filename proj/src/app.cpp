#include "cmm/app.hpp"

#include <cmath>
#include <fstream>
#include <iostream>
#include <thread>

#include "CLI11.hpp"
#include "cmm/config.hpp"
#include "cmm/constants.hpp"
#include "cmm/error.hpp"
#include "cmm/linear_model.hpp"
#include "cmm/pipeline.hpp"
#include "cmm/table.hpp"
#include "cmm/time_domain.hpp"

namespace cmm {

namespace {

using constants::hertz;

struct Flags {
  std::string config;
  std::string preset;
  std::vector<std::string> sets;
  std::string drive;
  std::string variant;
  std::string out;
  std::string format;
  int workers = -1;
  std::string filter_center;
  std::string filter_tau;
  std::string magnon_convention;
  std::string gm_cap;
  std::string resolution;
  std::string dump_trajectory;
  bool require_stable = false;
  bool no_tripartite = false;
};

RunConfig load(const Flags& f, const std::string& subcommand) {
  if (!f.config.empty() && !f.preset.empty()) {
    throw ConfigError("give either --config or --preset, not both");
  }
  RawConfig raw;
  if (!f.config.empty()) {
    raw = RawConfig::parse(read_text_file(f.config), f.config);
  } else if (!f.preset.empty()) {
    const std::string path = preset_path(f.preset);
    raw = RawConfig::parse(read_text_file(path), path);
  }
  for (const auto& s : f.sets) raw.set(s);
  // Dedicated flags take precedence over --set and the file.
  if (!f.drive.empty()) raw.set("drive.port", f.drive, "--drive");
  if (!f.variant.empty()) raw.set("model.variant", f.variant, "--variant");
  if (!f.out.empty()) raw.set("run.out", f.out, "--out");
  if (!f.format.empty()) raw.set("run.format", f.format, "--format");
  if (f.workers >= 0) raw.set("run.workers", std::to_string(f.workers), "--workers");
  if (!f.filter_center.empty()) raw.set("filter.center", f.filter_center, "--filter-center");
  if (!f.filter_tau.empty()) {
    raw.erase("filter.bandwidth");
    raw.set("filter.tau", f.filter_tau, "--filter-tau");
  }
  if (!f.magnon_convention.empty()) {
    raw.set("filter.convention", f.magnon_convention, "--magnon-convention");
  }
  const std::string section = subcommand == "comb-threshold" ? "comb" : "stability";
  if (!f.gm_cap.empty()) raw.set(section + ".cap", f.gm_cap, "--gm-cap");
  if (!f.resolution.empty()) raw.set(section + ".resolution", f.resolution, "--resolution");
  if (f.no_tripartite) raw.set("model.tripartite", "false", "--no-tripartite");
  return resolve_config(raw);
}

Metadata metadata(const RunConfig& cfg, const std::string& subcommand) {
  Metadata m;
  m.add("tool", "cmm " + std::string(kToolVersion));
  m.add("subcommand", subcommand);
  m.add("config_digest", cfg.digest);
  m.add("mode_order", "a_cw,a_ccw,m,b; quadratures (X,Y) per mode; vacuum variance 1/2");
  m.add("magnon_convention", to_string(cfg.evaluate.convention));
  m.add("output_port_rate", "kappa_a_e");
  m.add("frequency_columns", "_hz columns hold omega/2pi in Hz");
  const auto& gm = cfg.scenario.params.g_m;
  m.add("g_m", gm ? format_number(*gm) + " rad/s (configured)"
                  : format_number(inferred_single_magnon_coupling()) + " rad/s (inferred)");
  std::string joined;
  for (const auto& l : cfg.resolved) joined += (joined.empty() ? "" : "\n") + l;
  m.add("config", joined);
  return m;
}

void emit(const RunConfig& cfg, const Metadata& meta, const Table& table, std::ostream& out) {
  if (cfg.out.empty()) {
    write_table(out, cfg.format, meta, table);
    return;
  }
  std::ofstream file(cfg.out, std::ios::binary);
  if (!file) throw ConfigError("cannot write output file '" + cfg.out + "'");
  write_table(file, cfg.format, meta, table);
}

int worker_count(const RunConfig& cfg) {
  if (cfg.workers > 0) return cfg.workers;
  return static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
}

// ---- entanglement report columns ----

std::vector<std::string> report_columns(bool tripartite, bool filtered) {
  std::vector<std::string> c = {"stable", "abscissa_hz", "abs_G_m_hz", "arg_G_m", "E_acw_m",
                                "E_acw_b", "E_accw_m", "E_accw_b", "E_m_b", "E_acw_accw"};
  if (tripartite) {
    c.insert(c.end(), {"R_acw_m_b", "R_accw_m_b"});
  }
  if (filtered) {
    c.insert(c.end(), {"E_out_m", "fidelity", "fidelity_raw", "lo_phase", "filter_error"});
  }
  c.insert(c.end(), {"min_symplectic", "lyapunov_residual", "warnings", "error"});
  return c;
}

std::vector<Cell> report_cells(const EntReport* r, bool tripartite, bool filtered,
                               const std::string& error) {
  std::vector<Cell> row;
  const std::size_t n = report_columns(tripartite, filtered).size();
  if (!r) {
    row.assign(n, std::monostate{});
    row.back() = error;
    return row;
  }
  row.push_back(r->stable);
  row.push_back(hertz(r->abscissa));
  row.push_back(hertz(std::abs(r->steady.G_m)));
  row.push_back(std::arg(r->steady.G_m));
  auto val = [&](double v) -> Cell { return r->stable ? Cell(v) : Cell(std::monostate{}); };
  for (double v : {r->E_acw_m, r->E_acw_b, r->E_accw_m, r->E_accw_b, r->E_m_b, r->E_acw_accw}) {
    row.push_back(val(v));
  }
  if (tripartite) {
    row.push_back(r->R_acw ? Cell(r->R_acw->r_min) : Cell(std::monostate{}));
    row.push_back(r->R_accw ? Cell(r->R_accw->r_min) : Cell(std::monostate{}));
  }
  if (filtered) {
    if (r->filtered) {
      const auto& f = *r->filtered;
      row.insert(row.end(), {f.E_N, f.fidelity, f.fidelity_raw, f.lo_phase, f.error_estimate});
    } else {
      row.insert(row.end(), 5, std::monostate{});
    }
  }
  row.push_back(val(r->min_symplectic));
  row.push_back(val(r->lyapunov_residual));
  std::string warnings;
  for (const auto& w : r->warnings) warnings += (warnings.empty() ? "" : "; ") + w;
  row.push_back(warnings);
  row.push_back(error);
  return row;
}

std::string coord_column(const std::string& var) {
  if (var == "chi") return "chi";
  if (var == "temperature") return "temperature_K";
  if (var == "power") return "power_W";
  return var + "_hz";
}

double coord_value(const std::string& var, double v) {
  if (var == "chi" || var == "temperature" || var == "power") return v;
  return hertz(v);
}

// ---- subcommands ----

int cmd_steady(const RunConfig& cfg, std::ostream& out) {
  const auto& s = cfg.scenario;
  const SteadyField f = solve_steady_state(s.params, s.detunings, s.variant);
  Table t;
  t.columns = {"drive_port", "variant",  "a_cw_re",    "a_cw_im",       "a_ccw_re",
               "a_ccw_im",   "m_re",     "m_im",       "q_mean",        "G_m_re_hz",
               "G_m_im_hz",  "abs_G_m_hz", "delta_m_hz", "delta_m_eff_hz", "drive_E",
               "g_m",        "g_m_inferred"};
  t.rows.push_back({to_string(s.params.drive_port), to_string(s.variant), f.a_cw.real(),
                    f.a_cw.imag(), f.a_ccw.real(), f.a_ccw.imag(), f.m.real(), f.m.imag(),
                    f.q_mean, hertz(f.G_m.real()), hertz(f.G_m.imag()), hertz(std::abs(f.G_m)),
                    hertz(f.delta_m), hertz(f.delta_m_eff), f.drive, f.g_m, f.g_m_inferred});
  emit(cfg, metadata(cfg, "steady"), t, out);
  return 0;
}

int cmd_entangle(const RunConfig& cfg, bool require_stable, std::ostream& out, std::ostream& err) {
  const EntReport r = evaluate_point(cfg.scenario, cfg.evaluate);
  const bool tri = cfg.evaluate.tripartite;
  const bool filt = cfg.evaluate.filter.has_value();
  Table t;
  t.columns = {"drive_port", "variant"};
  const auto rc = report_columns(tri, filt);
  t.columns.insert(t.columns.end(), rc.begin(), rc.end());
  std::vector<Cell> row = {to_string(cfg.scenario.params.drive_port), to_string(cfg.scenario.variant)};
  const auto cells = report_cells(&r, tri, filt, "");
  row.insert(row.end(), cells.begin(), cells.end());
  t.rows.push_back(row);
  emit(cfg, metadata(cfg, "entangle"), t, out);
  for (const auto& w : r.warnings) err << "warning: " << w << '\n';
  if (!r.stable) {
    err << "note: drift matrix unstable (spectral abscissa " << format_number(r.abscissa)
        << " rad/s); no steady state\n";
    if (require_stable) return exit_code(ErrorCategory::Instability);
  }
  return 0;
}

int cmd_sweep(const RunConfig& cfg, std::ostream& out) {
  if (!cfg.sweep) throw ConfigError("sweep needs [sweep] x_var, x_start, x_stop");
  const auto rows = run_sweep(cfg.scenario, *cfg.sweep, worker_count(cfg));
  const bool tri = cfg.evaluate.tripartite;
  const bool filt = cfg.evaluate.filter.has_value();
  Table t;
  for (const auto& ax : cfg.sweep->axes) t.columns.push_back(coord_column(ax.name));
  t.columns.push_back("drive_port");
  const auto rc = report_columns(tri, filt);
  t.columns.insert(t.columns.end(), rc.begin(), rc.end());
  for (const auto& r : rows) {
    std::vector<Cell> row;
    for (std::size_t k = 0; k < r.coords.size(); ++k) {
      row.push_back(coord_value(cfg.sweep->axes[k].name, r.coords[k]));
    }
    row.push_back(to_string(r.port));
    const auto cells = report_cells(r.report ? &*r.report : nullptr, tri, filt, r.error);
    row.insert(row.end(), cells.begin(), cells.end());
    t.rows.push_back(std::move(row));
  }
  emit(cfg, metadata(cfg, "sweep"), t, out);
  return 0;
}

int cmd_comb(const RunConfig& cfg, const std::string& dump, std::ostream& out, std::ostream& err) {
  const auto& s = cfg.scenario;
  if (s.params.detuning_mode != DetuningMode::Effective) {
    throw ConfigError("comb-threshold holds the effective magnon detuning fixed; use detuning.mode = effective");
  }
  if (!dump.empty()) {
    const SteadyField f = solve_steady_state(s.params, s.detunings, s.variant);
    ClassicalDrive d;
    d.delta_a = s.detunings.delta_a;
    d.g_m = f.g_m;
    d.E = f.drive;
    d.delta_m = f.delta_m;
    IntegrationOptions opt;
    opt.t_end = cfg.comb.t_end > 0.0 ? cfg.comb.t_end : default_horizon(s.params);
    const Trajectory traj = integrate_classical(s.params, d, opt);
    std::ofstream file(dump, std::ios::binary);
    if (!file) throw ConfigError("cannot write trajectory file '" + dump + "'");
    write_trajectory_csv(file, traj, f.g_m);
    const auto info = classify_attractor(traj, s.params.omega_b);
    err << "trajectory: " << to_string(info.kind) << ", relative peak-to-peak "
        << format_number(info.relative_peak_to_peak) << '\n';
  }
  const CombThreshold c = comb_threshold(s.params, s.detunings, s.variant, cfg.comb);
  const double E = c.drive_at_threshold;
  const double power = E * E * constants::kHbar * s.params.omega_0 / (2.0 * s.params.kappa_a_e);
  Table t;
  t.columns = {"found",   "threshold_hz", "lower_hz", "upper_hz", "late_coupling_lower_hz",
               "g_m",     "drive_E",      "equivalent_power_W", "probes", "note"};
  auto opt = [&](double v) { return c.found ? Cell(v) : Cell(std::monostate{}); };
  t.rows.push_back({c.found, opt(hertz(c.coupling)), hertz(c.lower), hertz(c.upper),
                    hertz(c.late_coupling_lower), c.g_m, opt(E), opt(power),
                    static_cast<double>(c.probes.size()), c.note});
  emit(cfg, metadata(cfg, "comb-threshold"), t, out);
  return 0;
}

int cmd_stability(const RunConfig& cfg, std::ostream& out) {
  const auto& s = cfg.scenario;
  double phase = 0.0;
  if (cfg.stability_phase) {
    phase = *cfg.stability_phase;
  } else {
    const SteadyField f = solve_steady_state(s.params, s.detunings, s.variant);
    if (std::abs(f.G_m) > 0.0) phase = std::arg(f.G_m);
  }
  StabilityEdgeOptions opt = cfg.stability;
  opt.phase = phase;
  const StabilityEdge e = max_stable_coupling(s.params, s.detunings, s.variant, opt);
  Table t;
  t.columns = {"found", "edge_hz", "lower_hz", "upper_hz", "cap_hz", "phase", "evaluations"};
  t.rows.push_back({e.found, hertz(e.coupling), hertz(e.lower), hertz(e.upper), hertz(e.cap),
                    phase, static_cast<double>(e.evaluations)});
  emit(cfg, metadata(cfg, "stability-edge"), t, out);
  return 0;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Steady-state entanglement, output-mode teleportation and classical dynamics of a "
               "chiral cavity-magnomechanical system"};
  app.name("cmm");
  app.require_subcommand(1);
  app.fallthrough();
  Flags f;
  app.add_option("--config", f.config, "Configuration file (sectioned key = value)");
  app.add_option("--preset", f.preset, "Bundled figure preset, e.g. fig2a");
  app.add_option("--set", f.sets, "Override, section.key=value (repeatable)")->take_all();
  app.add_option("--drive", f.drive, "Driven port")->check(CLI::IsMember({"cw", "ccw"}));
  app.add_option("--variant", f.variant, "Model variant")
      ->check(CLI::IsMember({"ideal", "imperfect", "auto"}));
  app.add_option("--out", f.out, "Output file (default stdout)");
  app.add_option("--format", f.format, "Output format")->check(CLI::IsMember({"csv", "jsonl"}));
  app.add_option("--workers", f.workers, "Worker threads (0: all cores)")->check(CLI::NonNegativeNumber);

  app.add_subcommand("steady", "Classical steady-state means and G_m");
  auto* entangle = app.add_subcommand("entangle", "Entanglement report at one parameter point");
  auto* sweep = app.add_subcommand("sweep", "Parameter sweep over one or two axes");
  auto* comb = app.add_subcommand("comb-threshold", "Coupling threshold for self-oscillation");
  auto* stability = app.add_subcommand("stability-edge", "Largest |G_m| with a stable drift matrix");
  for (auto* sub : {entangle, sweep}) {
    sub->add_option("--filter-center", f.filter_center, "Filter centre, e.g. '-1 omega_b'");
    sub->add_option("--filter-tau", f.filter_tau, "Window duration, e.g. '1.6 us'");
    sub->add_option("--magnon-convention", f.magnon_convention, "windowed or instant")
        ->check(CLI::IsMember({"windowed", "instant"}));
    sub->add_flag("--no-tripartite", f.no_tripartite, "Skip residual contangles");
  }
  entangle->add_flag("--require-stable", f.require_stable, "Exit 3 when the point is unstable");
  for (auto* sub : {comb, stability}) {
    sub->add_option("--gm-cap", f.gm_cap, "Upper limit on |G_m|, e.g. '30 MHz'");
    sub->add_option("--resolution", f.resolution, "Bracket resolution, e.g. '0.01 MHz'");
  }
  comb->add_option("--dump-trajectory", f.dump_trajectory,
                   "Write the classical trajectory at the configured drive as CSV");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "error [config]: " << e.what() << '\n';
    return exit_code(ErrorCategory::Config);
  }

  try {
    const std::string name = app.get_subcommands().front()->get_name();
    const RunConfig cfg = load(f, name);
    if (name == "steady") return cmd_steady(cfg, out);
    if (name == "entangle") return cmd_entangle(cfg, f.require_stable, out, err);
    if (name == "sweep") return cmd_sweep(cfg, out);
    if (name == "comb-threshold") return cmd_comb(cfg, f.dump_trajectory, out, err);
    return cmd_stability(cfg, out);
  } catch (const Error& e) {
    static const char* names[] = {"config", "instability", "numerical"};
    err << "error [" << names[static_cast<int>(e.category())] << "]: " << e.what() << '\n';
    return exit_code(e.category());
  } catch (const std::exception& e) {
    err << "error [numerical]: " << e.what() << '\n';
    return exit_code(ErrorCategory::Numerical);
  }
}

}  // namespace cmm
