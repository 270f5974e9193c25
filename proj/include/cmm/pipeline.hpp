#pragma once

#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "cmm/error.hpp"
#include "cmm/measures.hpp"
#include "cmm/output_mode.hpp"
#include "cmm/params.hpp"
#include "cmm/steady_state.hpp"

namespace cmm {

struct Scenario {
  SystemParams params;
  Detunings detunings;
  Variant variant = Variant::Ideal;
};

struct EvaluateOptions {
  bool tripartite = true;
  std::optional<FilterSpec> filter;
  MagnonConvention convention = MagnonConvention::Instant;
};

struct FilteredReport {
  FilterSpec spec;
  MagnonConvention convention = MagnonConvention::Instant;
  double E_N = 0.0;
  double fidelity = 0.0;        // maximised over the local phase of the output mode
  double fidelity_raw = 0.0;    // at the frame's own quadratures
  double lo_phase = 0.0;        // rad
  double error_estimate = 0.0;
  bool bona_fide = false;
};

/// Stationary quantities at one parameter point. Measures are filled only when
/// `stable` is true.
struct EntReport {
  Scenario scenario;  // parameter echo
  SteadyField steady;
  bool stable = false;
  double abscissa = 0.0;

  double E_acw_m = 0.0;
  double E_acw_b = 0.0;
  double E_accw_m = 0.0;
  double E_accw_b = 0.0;
  double E_m_b = 0.0;
  double E_acw_accw = 0.0;
  std::optional<ContangleReport> R_acw;   // modes (a_cw, m, b)
  std::optional<ContangleReport> R_accw;  // modes (a_ccw, m, b)
  std::optional<FilteredReport> filtered;

  double lyapunov_residual = 0.0;
  double min_symplectic = 0.0;
  std::vector<std::string> warnings;
};

/// Steady state, linear model, stability gate, Lyapunov CM, measures. Errors
/// from the stages propagate with their category; an unstable point returns
/// stable = false without measures.
EntReport evaluate_point(const Scenario& scenario, const EvaluateOptions& options = {});

/// Value of a named measure: E_acw_m, E_acw_b, E_accw_m, E_accw_b, E_m_b,
/// E_acw_accw, R_acw_m_b, R_accw_m_b. Throws ConfigError for other names.
double measure(const EntReport& report, std::string_view name);

/// (E_cw - E_ccw) / (E_cw + E_ccw) for one measure, 0 when both vanish. The
/// reports must differ only in the drive port.
double nonreciprocity_contrast(const EntReport& cw, const EntReport& ccw, std::string_view name);

/// Sweepable quantity names: delta_a, delta_m (effective or bare, per the
/// detuning mode), J, chi, g_cw, g_ccw, kappa_a_e, kappa_a_i, kappa_m,
/// gamma_b, temperature, coupling, power, amplitude, g_m.
using AxisSetter = std::function<void(Scenario&, double)>;
AxisSetter axis_setter(const std::string& name);
bool is_sweepable(const std::string& name);

struct SweepAxis {
  std::string name;
  double start = 0.0;
  double stop = 0.0;
  int count = 2;

  double value(int i) const;
};

struct SweepSpec {
  std::vector<SweepAxis> axes;  // one or two; the last varies fastest
  std::vector<DrivePort> ports{DrivePort::CW};
  EvaluateOptions options;
};

struct SweepRow {
  std::vector<double> coords;
  DrivePort port = DrivePort::CW;
  std::optional<EntReport> report;
  std::optional<ErrorCategory> error_category;
  std::string error;
};

/// One row per grid point and port, row-major over the axes with CW before
/// CCW. Rows are computed on `workers` threads and stored by index, so the
/// output does not depend on the worker count. Per-point errors are recorded
/// in the row.
std::vector<SweepRow> run_sweep(const Scenario& base, const SweepSpec& spec, int workers = 1);

/// Validates axis names and counts; throws ConfigError.
void validate_sweep(const SweepSpec& spec);

}  // namespace cmm
