#include "cmm/config.hpp"

#include <algorithm>
#include <charconv>
#include <cstdlib>
#include <fstream>
#include <numbers>
#include <sstream>
#include <thread>

#include "cmm/constants.hpp"
#include "cmm/error.hpp"

#ifndef CMM_PRESET_DIR
#define CMM_PRESET_DIR "presets"
#endif

namespace cmm {

namespace {

enum class Kind { Rate, Temperature, Power, Time, Number, Integer, Text, Bool };

const std::map<std::string, std::vector<std::string>> kKeys = {
    {"system",
     {"omega_a", "omega_m", "omega_b", "omega_0", "kappa_a_i", "kappa_a_e", "kappa_m", "gamma_b",
      "g_cw", "g_ccw", "chi", "J", "g_m", "temperature"}},
    {"drive", {"port", "power", "amplitude", "coupling"}},
    {"detuning", {"mode", "delta_a", "delta_m"}},
    {"model", {"variant", "tripartite"}},
    {"filter", {"center", "tau", "bandwidth", "convention"}},
    {"sweep",
     {"x_var", "x_start", "x_stop", "x_count", "y_var", "y_start", "y_stop", "y_count", "ports"}},
    {"comb", {"cap", "step", "resolution", "t_end"}},
    {"stability", {"cap", "resolution", "step", "phase"}},
    {"run", {"workers", "format", "out"}},
};

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

bool known(const std::string& section, const std::string& key) {
  const auto it = kKeys.find(section);
  return it != kKeys.end() &&
         std::find(it->second.begin(), it->second.end(), key) != it->second.end();
}

struct References {
  std::optional<double> omega_b, kappa_m, kappa_a;
};

class Resolver {
 public:
  explicit Resolver(const RawConfig& raw) : raw_(raw) {}

  bool has(const std::string& key) const { return raw_.find(key) != nullptr; }

  double quantity(const std::string& key, Kind kind, double fallback) const {
    const RawEntry* e = raw_.find(key);
    return e ? parse(*e, key, kind) : fallback;
  }

  std::optional<double> optional_quantity(const std::string& key, Kind kind) const {
    const RawEntry* e = raw_.find(key);
    if (!e) return std::nullopt;
    return parse(*e, key, kind);
  }

  std::string text(const std::string& key, const std::string& fallback) const {
    const RawEntry* e = raw_.find(key);
    return e ? e->value : fallback;
  }

  [[noreturn]] void fail(const std::string& key, const std::string& msg) const {
    const RawEntry* e = raw_.find(key);
    const std::string where = e && e->line == 0 ? " (from " + e->origin + ")" : "";
    throw ConfigError(key + ": " + msg + where, e ? e->line : 0);
  }

  double parse(const RawEntry& e, const std::string& key, Kind kind) const {
    const std::string& s = e.value;
    double v = 0.0;
    const char* first = s.data();
    const char* last = s.data() + s.size();
    if (!s.empty() && *first == '+') ++first;
    const auto res = std::from_chars(first, last, v);
    if (res.ec != std::errc() || !std::isfinite(v)) fail(key, "expected a number, got '" + s + "'");
    const std::string unit = trim(std::string_view(res.ptr, last - res.ptr));
    auto missing = [&](const char* units) {
      if (v != 0.0) fail(key, std::string("missing unit (") + units + ")");
      return 0.0;
    };
    switch (kind) {
      case Kind::Number:
        if (!unit.empty()) fail(key, "dimensionless value expected, got unit '" + unit + "'");
        return v;
      case Kind::Integer: {
        if (!unit.empty() || v != std::floor(v)) fail(key, "integer expected, got '" + s + "'");
        return v;
      }
      case Kind::Rate: {
        static const std::map<std::string, double> hz = {
            {"Hz", 1.0}, {"kHz", 1e3}, {"MHz", 1e6}, {"GHz", 1e9}};
        if (unit.empty()) return missing("Hz, kHz, MHz, GHz, rad/s, omega_b, kappa_m, kappa_a");
        if (const auto it = hz.find(unit); it != hz.end()) return constants::angular(v * it->second);
        if (unit == "rad/s") return v;
        const std::optional<double>* ref = nullptr;
        if (unit == "omega_b") ref = &refs_.omega_b;
        if (unit == "kappa_m") ref = &refs_.kappa_m;
        if (unit == "kappa_a") ref = &refs_.kappa_a;
        if (!ref) fail(key, "unknown rate unit '" + unit + "'");
        if (!*ref) fail(key, "relative unit '" + unit + "' is not available here");
        return v * **ref;
      }
      case Kind::Temperature: {
        static const std::map<std::string, double> t = {{"K", 1.0}, {"mK", 1e-3}, {"uK", 1e-6}};
        if (unit.empty()) return missing("K, mK, uK");
        const auto it = t.find(unit);
        if (it == t.end()) fail(key, "unknown temperature unit '" + unit + "'");
        return v * it->second;
      }
      case Kind::Power: {
        static const std::map<std::string, double> w = {{"W", 1.0}, {"mW", 1e-3}, {"uW", 1e-6}};
        if (unit.empty()) return missing("W, mW, uW");
        const auto it = w.find(unit);
        if (it == w.end()) fail(key, "unknown power unit '" + unit + "'");
        return v * it->second;
      }
      case Kind::Time: {
        static const std::map<std::string, double> t = {
            {"s", 1.0}, {"ms", 1e-3}, {"us", 1e-6}, {"ns", 1e-9}};
        if (unit.empty()) return missing("s, ms, us, ns");
        const auto it = t.find(unit);
        if (it == t.end()) fail(key, "unknown time unit '" + unit + "'");
        return v * it->second;
      }
      default:
        fail(key, "not a numeric key");
    }
  }

  References refs_;

 private:
  const RawConfig& raw_;
};

Kind axis_kind(const std::string& var) {
  if (var == "chi") return Kind::Number;
  if (var == "temperature") return Kind::Temperature;
  if (var == "power") return Kind::Power;
  return Kind::Rate;
}

std::vector<DrivePort> parse_ports(const std::string& text, const Resolver& r) {
  std::vector<DrivePort> ports;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (item == "cw") {
      ports.push_back(DrivePort::CW);
    } else if (item == "ccw") {
      ports.push_back(DrivePort::CCW);
    } else {
      r.fail("sweep.ports", "expected a comma-separated list of cw, ccw");
    }
  }
  // CW rows precede CCW rows.
  std::stable_sort(ports.begin(), ports.end(), [](DrivePort a, DrivePort b) {
    return a == DrivePort::CW && b == DrivePort::CCW;
  });
  ports.erase(std::unique(ports.begin(), ports.end()), ports.end());
  return ports;
}

bool parse_bool(const std::string& key, const std::string& text, const Resolver& r) {
  if (text == "true" || text == "yes" || text == "1") return true;
  if (text == "false" || text == "no" || text == "0") return false;
  r.fail(key, "expected true or false");
}

std::string kind_unit(Kind kind) {
  switch (kind) {
    case Kind::Rate: return " rad/s";
    case Kind::Temperature: return " K";
    case Kind::Power: return " W";
    case Kind::Time: return " s";
    default: return "";
  }
}

}  // namespace

const std::map<std::string, std::vector<std::string>>& known_keys() { return kKeys; }

RawConfig RawConfig::parse(std::string_view text, const std::string& origin) {
  RawConfig cfg;
  std::string section;
  int line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const std::size_t end = std::min(text.find('\n', pos), text.size());
    std::string line(text.substr(pos, end - pos));
    pos = end + 1;
    ++line_no;
    if (const auto c = line.find_first_of("#;"); c != std::string::npos) line.erase(c);
    line = trim(line);
    if (line.empty()) {
      if (end == text.size()) break;
      continue;
    }
    if (line.front() == '[') {
      if (line.back() != ']') throw ConfigError("unterminated section header", line_no);
      section = trim(std::string_view(line).substr(1, line.size() - 2));
      if (!kKeys.count(section)) throw ConfigError("unknown section [" + section + "]", line_no);
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ConfigError("expected 'key = value'", line_no);
    if (section.empty()) throw ConfigError("key outside of any [section]", line_no);
    const std::string key = trim(std::string_view(line).substr(0, eq));
    const std::string value = trim(std::string_view(line).substr(eq + 1));
    if (!known(section, key)) {
      throw ConfigError("unknown key '" + key + "' in [" + section + "]", line_no);
    }
    if (value.empty()) throw ConfigError("empty value for '" + key + "'", line_no);
    const std::string full = section + "." + key;
    if (cfg.entries_.count(full)) throw ConfigError("duplicate key '" + full + "'", line_no);
    cfg.entries_[full] = {value, line_no, origin};
  }
  return cfg;
}

void RawConfig::set(const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos) throw ConfigError("--set expects section.key=value, got '" + assignment + "'");
  set(trim(std::string_view(assignment).substr(0, eq)),
      trim(std::string_view(assignment).substr(eq + 1)), "--set");
}

void RawConfig::set(const std::string& key, const std::string& value, const std::string& origin) {
  const auto dot = key.find('.');
  if (dot == std::string::npos || !known(key.substr(0, dot), key.substr(dot + 1))) {
    throw ConfigError("unknown configuration key '" + key + "'");
  }
  if (value.empty()) throw ConfigError("empty value for '" + key + "'");
  entries_[key] = {value, 0, origin};
}

const RawEntry* RawConfig::find(const std::string& key) const {
  const auto it = entries_.find(key);
  return it == entries_.end() ? nullptr : &it->second;
}

RunConfig resolve_config(const RawConfig& raw) {
  using constants::angular;
  Resolver r(raw);
  RunConfig cfg;
  SystemParams& p = cfg.scenario.params;

  // Absolute-only quantities first; they define the relative units.
  p.omega_b = r.quantity("system.omega_b", Kind::Rate, angular(10e6));
  r.refs_.omega_b = p.omega_b;
  p.kappa_m = r.quantity("system.kappa_m", Kind::Rate, angular(1e6));
  r.refs_.kappa_m = p.kappa_m;
  p.kappa_a_i = r.quantity("system.kappa_a_i", Kind::Rate, angular(0.2e6));
  p.kappa_a_e = r.quantity("system.kappa_a_e", Kind::Rate, angular(2.8e6));
  r.refs_.kappa_a = p.kappa_a();

  p.omega_a = r.quantity("system.omega_a", Kind::Rate, angular(10e9));
  p.omega_m = r.quantity("system.omega_m", Kind::Rate, angular(10e9));
  p.omega_0 = r.quantity("system.omega_0", Kind::Rate, angular(10e9));
  p.gamma_b = r.quantity("system.gamma_b", Kind::Rate, angular(100.0));
  p.g_cw = r.quantity("system.g_cw", Kind::Rate, angular(4e6));
  if (r.has("system.chi") && r.has("system.g_ccw")) {
    r.fail("system.chi", "give either chi or g_ccw, not both");
  }
  p.g_ccw = r.has("system.chi") ? r.quantity("system.chi", Kind::Number, 0.0) * p.g_cw
                                : r.quantity("system.g_ccw", Kind::Rate, 0.0);
  p.J = r.quantity("system.J", Kind::Rate, 0.0);
  p.g_m = r.optional_quantity("system.g_m", Kind::Rate);
  p.temperature = r.quantity("system.temperature", Kind::Temperature, 0.01);

  const std::string port = r.text("drive.port", "cw");
  if (port == "cw") {
    p.drive_port = DrivePort::CW;
  } else if (port == "ccw") {
    p.drive_port = DrivePort::CCW;
  } else {
    r.fail("drive.port", "expected cw or ccw");
  }
  const int n_drive = r.has("drive.power") + r.has("drive.amplitude") + r.has("drive.coupling");
  if (n_drive > 1) r.fail("drive.power", "give exactly one of power, amplitude, coupling");
  if (r.has("drive.power")) {
    p.drive = DrivePower{r.quantity("drive.power", Kind::Power, 0.0)};
  } else if (r.has("drive.amplitude")) {
    p.drive = DriveAmplitude{r.quantity("drive.amplitude", Kind::Rate, 0.0)};
  } else {
    p.drive = CouplingMagnitude{r.quantity("drive.coupling", Kind::Rate, angular(4e6))};
  }

  const std::string mode = r.text("detuning.mode", "effective");
  if (mode == "effective") {
    p.detuning_mode = DetuningMode::Effective;
  } else if (mode == "physical") {
    p.detuning_mode = DetuningMode::Physical;
  } else {
    r.fail("detuning.mode", "expected effective or physical");
  }
  const double da = r.quantity("detuning.delta_a", Kind::Rate, -0.72 * p.omega_b);
  const double dm = r.quantity("detuning.delta_m", Kind::Rate, 0.76 * p.omega_b);
  cfg.scenario.detunings = p.detuning_mode == DetuningMode::Effective
                               ? Detunings::effective(da, dm)
                               : Detunings::physical(da, dm);

  const std::string variant = r.text("model.variant", "auto");
  if (variant == "ideal") {
    cfg.scenario.variant = Variant::Ideal;
  } else if (variant == "imperfect") {
    cfg.scenario.variant = Variant::Imperfect;
  } else if (variant == "auto") {
    cfg.scenario.variant = p.J == 0.0 && p.g_ccw == 0.0 ? Variant::Ideal : Variant::Imperfect;
  } else {
    r.fail("model.variant", "expected ideal, imperfect or auto");
  }
  cfg.evaluate.tripartite = parse_bool("model.tripartite", r.text("model.tripartite", "true"), r);

  const bool any_filter = r.has("filter.center") || r.has("filter.tau") || r.has("filter.bandwidth");
  if (any_filter) {
    if (!r.has("filter.center")) r.fail("filter.tau", "filter needs a center");
    if (r.has("filter.tau") == r.has("filter.bandwidth")) {
      r.fail("filter.center", "filter needs exactly one of tau, bandwidth");
    }
    FilterSpec f;
    f.omega_center = r.quantity("filter.center", Kind::Rate, 0.0);
    f.tau = r.has("filter.tau") ? r.quantity("filter.tau", Kind::Time, 0.0)
                                : 1.0 / r.quantity("filter.bandwidth", Kind::Rate, 0.0);
    if (!(f.tau > 0.0) || !std::isfinite(f.tau)) r.fail("filter.tau", "window duration must be positive");
    cfg.evaluate.filter = f;
  }
  try {
    cfg.evaluate.convention = magnon_convention_from_string(r.text("filter.convention", "instant"));
  } catch (const ConfigError&) {
    r.fail("filter.convention", "expected windowed or instant");
  }

  if (r.has("sweep.x_var")) {
    SweepSpec sweep;
    for (const std::string axis : {"x", "y"}) {
      const std::string var_key = "sweep." + axis + "_var";
      if (!r.has(var_key)) {
        if (r.has("sweep." + axis + "_start") || r.has("sweep." + axis + "_stop")) {
          r.fail("sweep." + axis + "_start", "axis range given without " + var_key);
        }
        continue;
      }
      SweepAxis ax;
      ax.name = r.text(var_key, "");
      if (!is_sweepable(ax.name)) r.fail(var_key, "unknown sweep variable '" + ax.name + "'");
      for (const char* k : {"_start", "_stop"}) {
        if (!r.has("sweep." + axis + k)) r.fail(var_key, "missing sweep." + axis + k);
      }
      const Kind kind = axis_kind(ax.name);
      ax.start = r.quantity("sweep." + axis + "_start", kind, 0.0);
      ax.stop = r.quantity("sweep." + axis + "_stop", kind, 0.0);
      ax.count = static_cast<int>(r.quantity("sweep." + axis + "_count", Kind::Integer, 101));
      sweep.axes.push_back(ax);
    }
    sweep.ports = parse_ports(r.text("sweep.ports", "cw"), r);
    try {
      validate_sweep(sweep);
    } catch (const ConfigError& e) {
      r.fail("sweep.x_var", e.what());
    }
    cfg.sweep = sweep;
  } else if (r.has("sweep.y_var")) {
    r.fail("sweep.y_var", "a y axis needs an x axis");
  }

  cfg.comb.cap = r.quantity("comb.cap", Kind::Rate, 0.0);
  cfg.comb.scan_step = r.quantity("comb.step", Kind::Rate, 0.0);
  cfg.comb.resolution = r.quantity("comb.resolution", Kind::Rate, 0.0);
  cfg.comb.t_end = r.quantity("comb.t_end", Kind::Time, 0.0);
  cfg.stability.cap = r.quantity("stability.cap", Kind::Rate, 0.0);
  cfg.stability.resolution = r.quantity("stability.resolution", Kind::Rate, 0.0);
  cfg.stability.scan_step = r.quantity("stability.step", Kind::Rate, 0.0);
  cfg.stability_phase = r.optional_quantity("stability.phase", Kind::Number);

  const double workers = r.quantity("run.workers", Kind::Integer, 0.0);
  if (workers < 0) r.fail("run.workers", "must be >= 0");
  cfg.workers = static_cast<int>(workers);
  try {
    cfg.format = format_from_string(r.text("run.format", "csv"));
  } catch (const ConfigError&) {
    r.fail("run.format", "expected csv or jsonl");
  }
  cfg.out = r.text("run.out", "");

  const auto diagnostics = validate(p);
  for (const auto& d : diagnostics) {
    if (d.severity == Severity::Error) {
      std::string key = "system." + d.field;
      if (d.field.rfind("drive.", 0) == 0) key = d.field;
      r.fail(key, d.message);
    }
  }
  cfg.refresh_echo();
  return cfg;
}

void RunConfig::refresh_echo() {
  resolved.clear();
  const SystemParams& p = scenario.params;
  auto add = [&](const std::string& key, double v, const std::string& unit) {
    resolved.push_back(key + " = " + format_number(v) + unit);
  };
  auto add_text = [&](const std::string& key, const std::string& v) {
    resolved.push_back(key + " = " + v);
  };
  const std::string rate = kind_unit(Kind::Rate);
  add("system.omega_a", p.omega_a, rate);
  add("system.omega_m", p.omega_m, rate);
  add("system.omega_b", p.omega_b, rate);
  add("system.omega_0", p.omega_0, rate);
  add("system.kappa_a_i", p.kappa_a_i, rate);
  add("system.kappa_a_e", p.kappa_a_e, rate);
  add("system.kappa_m", p.kappa_m, rate);
  add("system.gamma_b", p.gamma_b, rate);
  add("system.g_cw", p.g_cw, rate);
  add("system.g_ccw", p.g_ccw, rate);
  add("system.J", p.J, rate);
  if (p.g_m) {
    add("system.g_m", *p.g_m, rate);
  } else {
    add_text("system.g_m", "unset");
  }
  add("system.temperature", p.temperature, kind_unit(Kind::Temperature));
  add_text("drive.port", to_string(p.drive_port));
  std::visit(
      [&](const auto& d) {
        using T = std::decay_t<decltype(d)>;
        if constexpr (std::is_same_v<T, DrivePower>) {
          add("drive.power", d.watts, kind_unit(Kind::Power));
        } else if constexpr (std::is_same_v<T, DriveAmplitude>) {
          add("drive.amplitude", d.rate, rate);
        } else {
          add("drive.coupling", d.rate, rate);
        }
      },
      p.drive);
  add_text("detuning.mode", to_string(p.detuning_mode));
  add("detuning.delta_a", scenario.detunings.delta_a, rate);
  add("detuning.delta_m", p.detuning_mode == DetuningMode::Effective
                              ? scenario.detunings.delta_m_eff
                              : scenario.detunings.delta_m,
      rate);
  add_text("model.variant", to_string(scenario.variant));
  add_text("model.tripartite", evaluate.tripartite ? "true" : "false");
  if (evaluate.filter) {
    add("filter.center", evaluate.filter->omega_center, rate);
    add("filter.tau", evaluate.filter->tau, kind_unit(Kind::Time));
  }
  add_text("filter.convention", to_string(evaluate.convention));
  if (sweep) {
    const char* names[] = {"x", "y"};
    for (std::size_t k = 0; k < sweep->axes.size(); ++k) {
      const auto& ax = sweep->axes[k];
      const std::string unit = kind_unit(axis_kind(ax.name));
      add_text(std::string("sweep.") + names[k] + "_var", ax.name);
      add(std::string("sweep.") + names[k] + "_start", ax.start, unit);
      add(std::string("sweep.") + names[k] + "_stop", ax.stop, unit);
      add_text(std::string("sweep.") + names[k] + "_count", std::to_string(ax.count));
    }
    std::string ports;
    for (auto port : sweep->ports) ports += (ports.empty() ? "" : ",") + to_string(port);
    add_text("sweep.ports", ports);
  }
  add("comb.cap", comb.cap, rate);
  add("comb.step", comb.scan_step, rate);
  add("comb.resolution", comb.resolution, rate);
  add("comb.t_end", comb.t_end, kind_unit(Kind::Time));
  add("stability.cap", stability.cap, rate);
  add("stability.resolution", stability.resolution, rate);
  add("stability.step", stability.scan_step, rate);
  if (stability_phase) {
    add("stability.phase", *stability_phase, "");
  } else {
    add_text("stability.phase", "steady-state");
  }
  std::string joined;
  for (const auto& l : resolved) joined += l + "\n";
  digest = fnv1a_hex(joined);
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open configuration file '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string preset_path(const std::string& name) {
  if (name.empty() || name.find_first_of("/\\") != std::string::npos || name.front() == '.') {
    throw ConfigError("invalid preset name '" + name + "'");
  }
  const char* env = std::getenv("CMM_PRESET_DIR");
  const std::string dir = env && *env ? env : CMM_PRESET_DIR;
  return dir + "/" + name + ".conf";
}

}  // namespace cmm
