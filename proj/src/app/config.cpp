#include "config.hpp"

#include "error.hpp"

#include <yaml-cpp/yaml.h>

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <set>
#include <sstream>
#include <string_view>
#include <utility>

namespace optomech::config {
namespace {

struct Unit {
  std::string_view name;
  double factor;
};

constexpr double two_pi = 2.0 * std::numbers::pi;

constexpr std::array<Unit, 5> frequency_units{{{"rad/s", 1.0}, {"Hz", two_pi}, {"kHz", two_pi * 1e3},
                                               {"MHz", two_pi * 1e6}, {"GHz", two_pi * 1e9}}};
constexpr std::array<Unit, 6> mass_units{
    {{"kg", 1.0}, {"g", 1e-3}, {"mg", 1e-6}, {"ug", 1e-9}, {"ng", 1e-12}, {"pg", 1e-15}}};
constexpr std::array<Unit, 5> length_units{{{"m", 1.0}, {"cm", 1e-2}, {"mm", 1e-3}, {"um", 1e-6}, {"nm", 1e-9}}};
constexpr std::array<Unit, 3> power_units{{{"W", 1.0}, {"mW", 1e-3}, {"uW", 1e-6}}};
constexpr std::array<Unit, 3> temperature_units{{{"K", 1.0}, {"mK", 1e-3}, {"uK", 1e-6}}};

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t')) s.remove_suffix(1);
  return s;
}

template <std::size_t N>
const Unit* find_unit(const std::array<Unit, N>& table, std::string_view name) {
  for (const auto& u : table) {
    if (u.name == name) return &u;
  }
  return nullptr;
}

template <std::size_t N>
std::string unit_list(const std::array<Unit, N>& table) {
  std::string out;
  for (const auto& u : table) {
    if (!out.empty()) out += ", ";
    out += u.name;
  }
  return out;
}

int line_of(const YAML::Node& node) { return node.Mark().line >= 0 ? node.Mark().line + 1 : 0; }

std::string scalar(const YAML::Node& node, const std::string& field) {
  if (!node.IsScalar()) throw ConfigError("expected a scalar value", line_of(node), field);
  return node.Scalar();
}

double plain_number(const YAML::Node& node, const std::string& field) {
  return parse_quantity(scalar(node, field), Dimension::Plain, 0.0, false, line_of(node), field);
}

bool boolean(const YAML::Node& node, const std::string& field) {
  const std::string s = scalar(node, field);
  if (s == "true") return true;
  if (s == "false") return false;
  throw ConfigError("expected true or false", line_of(node), field);
}

std::size_t count_value(const YAML::Node& node, const std::string& field) {
  const double v = plain_number(node, field);
  if (!(v >= 1.0) || v != std::floor(v) || v > 1e12) {
    throw ConfigError("expected a positive integer", line_of(node), field);
  }
  return static_cast<std::size_t>(v);
}

void require_map(const YAML::Node& node, const std::string& field) {
  if (!node.IsMap()) throw ConfigError("expected a mapping", line_of(node), field);
}

void check_keys(const YAML::Node& map, const std::set<std::string>& allowed, const std::string& where) {
  for (const auto& kv : map) {
    const std::string key = kv.first.Scalar();
    if (!allowed.count(key)) {
      const std::string field = where.empty() ? key : where + "." + key;
      throw ConfigError("unknown key", line_of(kv.first), field);
    }
  }
}

YAML::Node parse_yaml(const std::string& text, const std::string& origin) {
  try {
    return YAML::Load(text);
  } catch (const YAML::Exception& e) {
    throw ConfigError(origin + ": " + e.msg, e.mark.line >= 0 ? e.mark.line + 1 : 0);
  }
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::Io, "cannot read " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

const std::set<std::string> system_keys{"omega_m", "quality", "mass", "length", "wavelength", "finesse", "kappa",
                                        "power", "detuning", "bare_detuning", "temperature"};

// Applies the keys present in `node` on top of `p`. Required keys are only
// enforced when `complete` is set.
void apply_system(const YAML::Node& node, model::SystemParams& p, bool complete, const std::string& where) {
  require_map(node, where.empty() ? "system" : where);
  check_keys(node, system_keys, where);
  auto field = [&](const char* key) { return where.empty() ? std::string(key) : where + "." + key; };
  auto get = [&](const char* key, Dimension dim, double& out) {
    if (const YAML::Node n = node[key]) {
      out = parse_quantity(scalar(n, field(key)), dim, p.omega_m, false, line_of(n), field(key));
      return true;
    }
    if (complete) throw ConfigError("missing required key", line_of(node), field(key));
    return false;
  };
  if (const YAML::Node n = node["omega_m"]) {
    const std::string text = scalar(n, field("omega_m"));
    if (text.find("omega_m") != std::string::npos) {
      throw ConfigError("omega_m cannot be given in units of itself", line_of(n), field("omega_m"));
    }
    p.omega_m = parse_quantity(text, Dimension::Frequency, 0.0, false, line_of(n), field("omega_m"));
  } else if (complete) {
    throw ConfigError("missing required key", line_of(node), field("omega_m"));
  }
  get("quality", Dimension::Plain, p.quality);
  get("mass", Dimension::Mass, p.mass);
  get("length", Dimension::Length, p.length);
  get("wavelength", Dimension::Length, p.wavelength);
  get("power", Dimension::Power, p.power);
  get("temperature", Dimension::Temperature, p.temperature);

  const YAML::Node fin = node["finesse"], kap = node["kappa"];
  if (fin && kap) throw ConfigError("give either finesse or kappa, not both", line_of(kap), field("kappa"));
  if (fin) {
    p.finesse = parse_quantity(scalar(fin, field("finesse")), Dimension::Plain, 0.0, false, line_of(fin), field("finesse"));
    p.kappa.reset();
  } else if (kap) {
    p.kappa = parse_quantity(scalar(kap, field("kappa")), Dimension::Frequency, p.omega_m, false, line_of(kap),
                             field("kappa"));
    p.finesse.reset();
  } else if (complete) {
    throw ConfigError("one of finesse or kappa is required", line_of(node), field("finesse"));
  }

  const YAML::Node det = node["detuning"], bare = node["bare_detuning"];
  if (det && bare) {
    throw ConfigError("give either detuning or bare_detuning, not both", line_of(bare), field("bare_detuning"));
  }
  if (det) {
    p.detuning = parse_quantity(scalar(det, field("detuning")), Dimension::Frequency, p.omega_m, false,
                                line_of(det), field("detuning"));
    p.detuning_kind = model::DetuningKind::Effective;
  } else if (bare) {
    p.detuning = parse_quantity(scalar(bare, field("bare_detuning")), Dimension::Frequency, p.omega_m, false,
                                line_of(bare), field("bare_detuning"));
    p.detuning_kind = model::DetuningKind::Bare;
  } else if (complete) {
    throw ConfigError("one of detuning or bare_detuning is required", line_of(node), field("detuning"));
  }
}

void validate_system(const model::SystemParams& p, const std::string& origin) {
  try {
    p.validate();
  } catch (const InvalidArgument& e) {
    throw ConfigError(origin + ": " + e.what());
  }
}

struct ParamInfo {
  Param param;
  const char* name;
  Dimension dim;
  bool normalized;
};

constexpr std::array<ParamInfo, 12> params{{
    {Param::Detuning, "detuning", Dimension::Frequency, false},
    {Param::BareDetuning, "bare_detuning", Dimension::Frequency, false},
    {Param::Power, "power", Dimension::Power, false},
    {Param::Finesse, "finesse", Dimension::Plain, false},
    {Param::Kappa, "kappa", Dimension::Frequency, false},
    {Param::Temperature, "temperature", Dimension::Temperature, false},
    {Param::Mass, "mass", Dimension::Mass, false},
    {Param::Quality, "quality", Dimension::Plain, false},
    {Param::Epsilon, "epsilon", Dimension::Epsilon, true},
    {Param::Center, "center", Dimension::Frequency, true},
    {Param::Center2, "center2", Dimension::Frequency, true},
    {Param::Omega, "omega", Dimension::Frequency, true},
}};

constexpr std::array<std::pair<Observable, const char*>, 6> observables{{
    {Observable::Intracavity, "intracavity"},
    {Observable::Cooling, "cooling"},
    {Observable::Spectrum, "spectrum"},
    {Observable::MechOutput, "mech_output"},
    {Observable::TwoMode, "two_mode"},
    {Observable::Tripartite, "tripartite"},
}};

Axis parse_axis(const YAML::Node& node, std::size_t index, double omega_m) {
  const std::string where = "axes[" + std::to_string(index) + "]";
  require_map(node, where);
  check_keys(node, {"param", "scale", "from", "to", "count", "values"}, where);
  const YAML::Node pn = node["param"];
  if (!pn) throw ConfigError("missing required key", line_of(node), where + ".param");
  const std::string pname = scalar(pn, where + ".param");
  const ParamInfo* info = nullptr;
  for (const auto& p : params) {
    if (pname == p.name) info = &p;
  }
  if (!info) throw ConfigError("unknown parameter '" + pname + "'", line_of(pn), where + ".param");

  auto quantity = [&](const YAML::Node& n, const std::string& field) {
    return parse_quantity(scalar(n, field), info->dim, omega_m, info->normalized, line_of(n), field);
  };

  Axis axis{info->param, {}};
  std::string scale = "linear";
  if (const YAML::Node s = node["scale"]) scale = scalar(s, where + ".scale");
  if (scale == "values") {
    const YAML::Node vals = node["values"];
    if (!vals || !vals.IsSequence() || vals.size() == 0) {
      throw ConfigError("expected a non-empty list", line_of(vals ? vals : node), where + ".values");
    }
    if (node["from"] || node["to"] || node["count"]) {
      throw ConfigError("from/to/count do not apply to scale: values", line_of(node), where);
    }
    for (std::size_t i = 0; i < vals.size(); ++i) {
      axis.values.push_back(quantity(vals[i], where + ".values[" + std::to_string(i) + "]"));
    }
    return axis;
  }
  if (scale != "linear" && scale != "log") {
    throw ConfigError("scale must be linear, log or values", line_of(node["scale"]), where + ".scale");
  }
  if (node["values"]) throw ConfigError("values requires scale: values", line_of(node["values"]), where + ".values");
  for (const char* key : {"from", "to", "count"}) {
    if (!node[key]) throw ConfigError("missing required key", line_of(node), where + "." + key);
  }
  const double from = quantity(node["from"], where + ".from");
  const double to = quantity(node["to"], where + ".to");
  const std::size_t count = count_value(node["count"], where + ".count");
  if (scale == "log" && !(from > 0.0 && to > 0.0)) {
    throw ConfigError("log scale needs positive endpoints", line_of(node), where);
  }
  for (std::size_t i = 0; i < count; ++i) {
    const double t = count == 1 ? 0.0 : static_cast<double>(i) / static_cast<double>(count - 1);
    if (scale == "linear") {
      axis.values.push_back(i + 1 == count && count > 1 ? to : from + (to - from) * t);
    } else {
      axis.values.push_back(i + 1 == count && count > 1 ? to : from * std::pow(to / from, t));
    }
  }
  return axis;
}

}  // namespace

double parse_quantity(const std::string& text, Dimension dim, double omega_m_si, bool normalized, int line,
                      const std::string& field) {
  const std::string_view s = trim(text);
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
  if (ec != std::errc() || ptr == s.data()) throw ConfigError("expected a number, got '" + text + "'", line, field);
  if (!std::isfinite(value)) throw ConfigError("value must be finite", line, field);
  const std::string_view unit = trim(s.substr(static_cast<std::size_t>(ptr - s.data())));

  auto missing = [&](const std::string& accepted) {
    return ConfigError("unit required (one of " + accepted + ")", line, field);
  };
  auto unknown = [&](const std::string& accepted) {
    return ConfigError("unknown unit '" + std::string(unit) + "' (accepted: " + accepted + ")", line, field);
  };

  switch (dim) {
    case Dimension::Plain:
      if (!unit.empty()) throw ConfigError("dimensionless value takes no unit", line, field);
      return value;
    case Dimension::Epsilon:
      if (unit.empty()) return value;
      if (unit == "pi") return value * std::numbers::pi;
      throw unknown("none, pi");
    case Dimension::Frequency: {
      const std::string accepted = unit_list(frequency_units) + ", omega_m";
      if (unit.empty()) throw missing(accepted);
      if (unit == "omega_m") {
        if (normalized) return value;
        if (!(omega_m_si > 0.0)) throw ConfigError("omega_m must be known before using it as a unit", line, field);
        return value * omega_m_si;
      }
      const Unit* u = find_unit(frequency_units, unit);
      if (!u) throw unknown(accepted);
      if (!normalized) return value * u->factor;
      if (!(omega_m_si > 0.0)) throw ConfigError("omega_m must be known to normalize this value", line, field);
      return value * u->factor / omega_m_si;
    }
    case Dimension::Mass:
    case Dimension::Length:
    case Dimension::Power:
    case Dimension::Temperature: {
      const Unit* u = nullptr;
      std::string accepted;
      if (dim == Dimension::Mass) {
        u = find_unit(mass_units, unit);
        accepted = unit_list(mass_units);
      } else if (dim == Dimension::Length) {
        u = find_unit(length_units, unit);
        accepted = unit_list(length_units);
      } else if (dim == Dimension::Power) {
        u = find_unit(power_units, unit);
        accepted = unit_list(power_units);
      } else {
        u = find_unit(temperature_units, unit);
        accepted = unit_list(temperature_units);
      }
      if (unit.empty()) throw missing(accepted);
      if (!u) throw unknown(accepted);
      return value * u->factor;
    }
  }
  throw ConfigError("unsupported dimension", line, field);
}

model::SystemParams parse_system(const std::string& text, const std::string& origin) {
  const YAML::Node root = parse_yaml(text, origin);
  model::SystemParams p;
  apply_system(root, p, true, "");
  validate_system(p, origin);
  return p;
}

model::SystemParams load_system(const std::string& path) { return parse_system(read_file(path), path); }

const char* param_name(Param p) {
  for (const auto& info : params) {
    if (info.param == p) return info.name;
  }
  return "?";
}

const char* observable_name(Observable o) {
  for (const auto& [obs, name] : observables) {
    if (obs == o) return name;
  }
  return "?";
}

std::size_t SweepSpec::grid_size() const {
  std::size_t n = axes.empty() ? 0 : 1;
  for (const auto& a : axes) {
    if (a.values.empty()) return 0;
    if (n > static_cast<std::size_t>(-1) / a.values.size()) return static_cast<std::size_t>(-1);
    n *= a.values.size();
  }
  return n;
}

namespace {

SweepSpec parse_sweep_impl(const std::string& text, const std::string& origin, const std::filesystem::path& base) {
  const YAML::Node root = parse_yaml(text, origin);
  require_map(root, "<root>");
  check_keys(root, {"name", "system", "axes", "observables", "epsilon", "centers", "markovian", "tolerance",
                    "max_points"},
             "");
  SweepSpec spec;
  spec.source_path = origin;
  spec.source_text = text;

  const YAML::Node name = root["name"];
  if (!name) throw ConfigError("missing required key", 1, "name");
  spec.name = scalar(name, "name");
  if (spec.name.empty() || spec.name.find_first_of("/\\") != std::string::npos) {
    throw ConfigError("name must be a non-empty file stem", line_of(name), "name");
  }

  // system: a path to a system file, or a mapping with an optional `base`
  // path whose keys override the base file.
  const YAML::Node sys = root["system"];
  if (!sys) throw ConfigError("missing required key", 1, "system");
  if (sys.IsScalar()) {
    spec.system = load_system((base / sys.Scalar()).string());
  } else {
    require_map(sys, "system");
    YAML::Node overrides = YAML::Clone(sys);
    bool complete = true;
    if (const YAML::Node b = sys["base"]) {
      spec.system = load_system((base / scalar(b, "system.base")).string());
      overrides.remove("base");
      complete = false;
    }
    apply_system(overrides, spec.system, complete, "system");
    validate_system(spec.system, origin);
  }

  const YAML::Node axes = root["axes"];
  if (!axes) throw ConfigError("missing required key", 1, "axes");
  if (!axes.IsSequence() || axes.size() == 0) throw ConfigError("axes must be a non-empty list", line_of(axes), "axes");
  std::set<Param> seen;
  for (std::size_t i = 0; i < axes.size(); ++i) {
    Axis axis = parse_axis(axes[i], i, spec.system.omega_m);
    if (!seen.insert(axis.param).second) {
      throw ConfigError("parameter swept twice", line_of(axes[i]), "axes[" + std::to_string(i) + "].param");
    }
    spec.axes.push_back(std::move(axis));
  }
  if (seen.count(Param::Detuning) && seen.count(Param::BareDetuning)) {
    throw ConfigError("sweep either detuning or bare_detuning, not both", line_of(axes), "axes");
  }
  if (seen.count(Param::Finesse) && seen.count(Param::Kappa)) {
    throw ConfigError("sweep either finesse or kappa, not both", line_of(axes), "axes");
  }

  const YAML::Node obs = root["observables"];
  if (!obs) throw ConfigError("missing required key", 1, "observables");
  if (!obs.IsSequence() || obs.size() == 0) {
    throw ConfigError("observables must be a non-empty list", line_of(obs), "observables");
  }
  for (std::size_t i = 0; i < obs.size(); ++i) {
    const std::string field = "observables[" + std::to_string(i) + "]";
    const std::string o = scalar(obs[i], field);
    bool found = false;
    for (const auto& [kind, n] : observables) {
      if (o == n) {
        if (std::find(spec.observables.begin(), spec.observables.end(), kind) != spec.observables.end()) {
          throw ConfigError("observable listed twice", line_of(obs[i]), field);
        }
        spec.observables.push_back(kind);
        found = true;
      }
    }
    if (!found) {
      std::string accepted;
      for (const auto& [kind, n] : observables) accepted += (accepted.empty() ? "" : ", ") + std::string(n);
      throw ConfigError("unknown observable '" + o + "' (accepted: " + accepted + ")", line_of(obs[i]), field);
    }
  }
  const bool wants_omega = std::find(spec.observables.begin(), spec.observables.end(), Observable::Spectrum) !=
                           spec.observables.end();
  if (wants_omega != (seen.count(Param::Omega) > 0)) {
    throw ConfigError("the spectrum observable requires an omega axis and vice versa", line_of(obs), "observables");
  }

  if (const YAML::Node e = root["epsilon"]) {
    spec.epsilon = parse_quantity(scalar(e, "epsilon"), Dimension::Epsilon, 0.0, false, line_of(e), "epsilon");
    if (!(spec.epsilon > 0.0)) throw ConfigError("epsilon must be positive", line_of(e), "epsilon");
  }
  if (const YAML::Node c = root["centers"]) {
    if (!c.IsSequence() || c.size() == 0 || c.size() > 2) {
      throw ConfigError("centers must list one or two frequencies", line_of(c), "centers");
    }
    spec.centers.clear();
    for (std::size_t i = 0; i < c.size(); ++i) {
      const std::string field = "centers[" + std::to_string(i) + "]";
      spec.centers.push_back(
          parse_quantity(scalar(c[i], field), Dimension::Frequency, spec.system.omega_m, true, line_of(c[i]), field));
    }
    if (spec.centers.size() == 1) spec.centers.push_back(1.0);
  }
  if (const YAML::Node m = root["markovian"]) spec.markovian = boolean(m, "markovian");
  if (const YAML::Node t = root["tolerance"]) {
    spec.tolerance = plain_number(t, "tolerance");
    if (!(spec.tolerance > 0.0 && spec.tolerance < 1.0)) {
      throw ConfigError("tolerance must lie in (0, 1)", line_of(t), "tolerance");
    }
  }
  if (const YAML::Node m = root["max_points"]) spec.max_points = count_value(m, "max_points");
  if (spec.grid_size() > spec.max_points) {
    throw ConfigError("grid has " + std::to_string(spec.grid_size()) + " points, above max_points = " +
                          std::to_string(spec.max_points),
                      line_of(axes), "max_points");
  }
  return spec;
}

}  // namespace

SweepSpec parse_sweep(const std::string& text, const std::string& origin) {
  return parse_sweep_impl(text, origin, std::filesystem::current_path());
}

SweepSpec load_sweep(const std::string& path) {
  const std::string text = read_file(path);
  return parse_sweep_impl(text, path, std::filesystem::path(path).parent_path());
}

}  // namespace optomech::config
