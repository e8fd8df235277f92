#include "optomech/optomech.h"

#include "CLI11.hpp"
#include "json.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <filesystem>
#include <iostream>
#include <memory>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#ifndef OMSOLVE_PRESET_DIR
#define OMSOLVE_PRESET_DIR "presets"
#endif

namespace {

struct Globals {
  unsigned threads = 1;
  double tol = 1e-8;
  std::uint64_t seed = 1;
  std::string format = "csv";
};

struct Failure {
  om_status status;
};

void check(om_status status) {
  if (status != OM_OK) {
    std::cerr << "omsolve: " << om_status_name(status) << ": " << om_last_error() << "\n";
    throw Failure{status};
  }
}

struct SystemDeleter {
  void operator()(om_system* s) const { om_system_free(s); }
};
struct CmDeleter {
  void operator()(om_cm* c) const { om_cm_free(c); }
};
using SystemPtr = std::unique_ptr<om_system, SystemDeleter>;
using CmPtr = std::unique_ptr<om_cm, CmDeleter>;

SystemPtr load_system(const std::string& path) {
  om_system* s = nullptr;
  check(om_system_load(path.c_str(), &s));
  return SystemPtr(s);
}

// Shortest round-trip representation; empty for non-finite values.
std::string num(double v) {
  if (!std::isfinite(v)) return {};
  char buf[64];
  const auto r = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, r.ptr);
}

nlohmann::ordered_json jnum(double v) {
  if (!std::isfinite(v)) return nullptr;
  return v;
}

// "<x>" or "<x> pi" / "<x>pi".
double parse_epsilon(const std::string& text) {
  std::string t = text;
  double scale = 1.0;
  if (t.size() >= 2 && t.compare(t.size() - 2, 2, "pi") == 0) {
    t.resize(t.size() - 2);
    while (!t.empty() && t.back() == ' ') t.pop_back();
    scale = std::numbers::pi;
  }
  double v = 0.0;
  const auto r = std::from_chars(t.data(), t.data() + t.size(), v);
  if (r.ec != std::errc() || r.ptr != t.data() + t.size()) throw CLI::ValidationError("epsilon", "bad value: " + text);
  return v * scale;
}

std::vector<double> linspace(double from, double to, std::size_t count) {
  std::vector<double> v(count);
  for (std::size_t i = 0; i < count; ++i) {
    v[i] = count == 1 ? from : (i + 1 == count ? to : from + (to - from) * static_cast<double>(i) / (count - 1));
  }
  return v;
}

void print_table(const Globals& g, const std::vector<std::string>& columns,
                 const std::vector<std::vector<double>>& rows) {
  if (g.format == "json") {
    nlohmann::ordered_json out = nlohmann::ordered_json::array();
    for (const auto& row : rows) {
      nlohmann::ordered_json rec;
      for (std::size_t i = 0; i < columns.size(); ++i) rec[columns[i]] = jnum(row[i]);
      out.push_back(std::move(rec));
    }
    std::cout << out.dump(1) << "\n";
    return;
  }
  for (std::size_t i = 0; i < columns.size(); ++i) std::cout << (i ? "," : "") << columns[i];
  std::cout << "\n";
  for (const auto& row : rows) {
    for (std::size_t i = 0; i < row.size(); ++i) std::cout << (i ? "," : "") << num(row[i]);
    std::cout << "\n";
  }
}

nlohmann::ordered_json cm_json(const om_cm* cm) {
  const std::size_t n = om_cm_dim(cm);
  std::vector<double> buf(n * n);
  check(om_cm_copy(cm, buf.data(), buf.size()));
  nlohmann::ordered_json labels = nlohmann::ordered_json::array(), rows = nlohmann::ordered_json::array();
  for (std::size_t m = 0; m < n / 2; ++m) labels.push_back(om_cm_label(cm, m) ? om_cm_label(cm, m) : "");
  for (std::size_t i = 0; i < n; ++i) {
    nlohmann::ordered_json row = nlohmann::ordered_json::array();
    for (std::size_t j = 0; j < n; ++j) row.push_back(buf[i * n + j]);
    rows.push_back(std::move(row));
  }
  return {{"convention", "symmetrized, (q,p) per mode, vacuum variance 1/2"}, {"modes", labels}, {"matrix", rows}};
}

int cmd_steady(const Globals& g, const std::string& config, const std::string& method) {
  const auto sys = load_system(config);
  om_derived d;
  check(om_system_derived(sys.get(), &d));
  om_stability st;
  check(om_system_stability(sys.get(), &st));
  nlohmann::ordered_json out;
  out["derived"] = {{"omega_m_rad_s", d.omega_m_si},    {"kappa_rad_s", d.kappa_si},
                    {"kappa_norm", d.rates.kappa},      {"g0_rad_s", d.g0_si},
                    {"g0_Hz", d.g0_si / (2.0 * std::numbers::pi)},
                    {"coupling_rad_s", d.coupling_si},  {"coupling_norm", d.rates.coupling},
                    {"detuning_rad_s", d.detuning_si},  {"detuning_norm", d.rates.detuning},
                    {"bare_detuning_rad_s", d.detuning0_si}, {"gamma_m_norm", d.rates.gamma_m},
                    {"n_bar", d.rates.n_bar},           {"alpha_s", d.alpha_s}};
  out["stability"] = {{"stable", st.stable != 0}, {"s1", st.s1}, {"s2", st.s2}, {"max_real_part", st.max_real_part}};
  om_cooling c;
  check(om_system_cooling(sys.get(), &c));
  out["cooling"] = {{"a_plus", c.a_plus},
                    {"a_minus", c.a_minus},
                    {"gamma_net", c.net_rate},
                    {"n_eff_pert", jnum(c.n_eff_perturbative)},
                    {"n_eff", jnum(c.n_eff_exact)}};
  int code = 0;
  if (st.stable) {
    const om_cm_method m = method == "lyapunov"   ? OM_CM_LYAPUNOV
                           : method == "spectral" ? OM_CM_SPECTRAL_MARKOVIAN
                                                  : OM_CM_SPECTRAL_THERMAL;
    om_cm* raw = nullptr;
    check(om_steady_cm(sys.get(), m, g.tol, &raw));
    const CmPtr cm(raw);
    double en = 0.0, nu = 0.0;
    check(om_log_negativity(cm.get(), 0, 1, &en));
    check(om_cm_min_symplectic(cm.get(), &nu));
    out["cm"] = cm_json(cm.get());
    out["cm"]["method"] = method;
    out["log_negativity"] = en;
    out["min_symplectic_eigenvalue"] = nu;
  } else {
    out["cm"] = nullptr;
    out["log_negativity"] = nullptr;
    code = 2;
  }
  if (g.format == "json") {
    std::cout << out.dump(2) << "\n";
    return code;
  }
  std::cout << "quantity,value\n";
  for (const char* group : {"derived", "stability", "cooling"}) {
    for (const auto& [k, v] : out[group].items()) {
      std::cout << k << ",";
      if (v.is_boolean()) std::cout << (v.get<bool>() ? "true" : "false");
      else if (v.is_number()) std::cout << num(v.get<double>());
      std::cout << "\n";
    }
  }
  if (st.stable) {
    std::cout << "log_negativity," << num(out["log_negativity"].get<double>()) << "\n";
    std::cout << "min_symplectic_eigenvalue," << num(out["min_symplectic_eigenvalue"].get<double>()) << "\n";
    const auto& m = out["cm"]["matrix"];
    for (std::size_t i = 0; i < m.size(); ++i) {
      for (std::size_t j = 0; j < m[i].size(); ++j) std::cout << "cm_" << i << j << "," << num(m[i][j].get<double>()) << "\n";
    }
  } else {
    std::cout << "log_negativity,\n";
  }
  return code;
}

int cmd_spectrum(const Globals& g, const std::string& config, double from, double to, std::size_t count,
                 bool thermal) {
  const auto sys = load_system(config);
  const auto grid = linspace(from, to, count);
  std::vector<double> values(grid.size());
  check(om_output_spectrum(sys.get(), grid.data(), grid.size(), thermal ? 0 : 1, values.data()));
  std::vector<std::vector<double>> rows;
  for (std::size_t i = 0; i < grid.size(); ++i) rows.push_back({grid[i], values[i]});
  print_table(g, {"omega_norm", "spectrum"}, rows);
  return 0;
}

int cmd_output_scan(const Globals& g, const std::string& config, const std::vector<std::string>& epsilons,
                    double from, double to, std::size_t count) {
  const auto sys = load_system(config);
  std::vector<std::vector<double>> rows;
  for (const auto& e : epsilons) {
    const double eps = parse_epsilon(e);
    for (double center : linspace(from, to, count)) {
      om_cm* raw = nullptr;
      check(om_output_cm(sys.get(), &center, 1, eps, g.tol, 1, &raw));
      const CmPtr cm(raw);
      double en = 0.0;
      check(om_log_negativity(cm.get(), 0, 1, &en));
      rows.push_back({eps, center, en});
    }
  }
  print_table(g, {"epsilon", "center_norm", "en_mech_output"}, rows);
  return 0;
}

int cmd_tripartite(const Globals& g, const std::string& config, const std::string& epsilon,
                   const std::vector<double>& centers) {
  const auto sys = load_system(config);
  const double eps = parse_epsilon(epsilon);
  om_cm* raw = nullptr;
  check(om_output_cm(sys.get(), centers.data(), centers.size(), eps, g.tol, 1, &raw));
  const CmPtr cm(raw);
  double values[3];
  int fully = 0;
  check(om_tripartite(cm.get(), values, &fully));
  static constexpr const char* names[] = {"mechanics|rest", "stokes|rest", "anti_stokes|rest"};
  if (g.format == "json") {
    nlohmann::ordered_json out;
    out["epsilon"] = eps;
    out["centers_norm"] = centers;
    for (int k = 0; k < 3; ++k) out["cuts"].push_back({{"cut", names[k]}, {"min_pt_eigenvalue_minus_half", values[k]}});
    out["fully_inseparable"] = fully != 0;
    std::cout << out.dump(2) << "\n";
  } else {
    std::cout << "cut,min_pt_eigenvalue_minus_half\n";
    for (int k = 0; k < 3; ++k) std::cout << names[k] << "," << num(values[k]) << "\n";
    std::cout << "fully_inseparable," << (fully ? "true" : "false") << "\n";
  }
  return 0;
}

om_run_options run_options(const Globals& g, const std::string& out_dir, bool svg, bool tol_given) {
  om_run_options o;
  om_run_options_init(&o);
  o.threads = g.threads;
  o.tolerance = tol_given ? g.tol : 0.0;
  o.seed = g.seed;
  o.format = g.format == "json" ? OM_FORMAT_JSON : OM_FORMAT_CSV;
  o.output_dir = out_dir.c_str();
  o.svg = svg ? 1 : 0;
  return o;
}

int run_one(const std::string& config, const om_run_options& o) {
  om_sweep_summary s;
  check(om_run_sweep(config.c_str(), &o, &s));
  std::cerr << "wrote " << s.data_path << " (" << s.points << " points, " << s.unstable << " unstable, " << s.failed
            << " failed) and " << s.provenance_path;
  if (s.svg_path[0]) std::cerr << " and " << s.svg_path;
  std::cerr << "\n";
  return 0;
}

int cmd_figure(const om_run_options& o, int figure, const std::string& preset_dir) {
  namespace fs = std::filesystem;
  std::vector<fs::path> configs;
  const std::string stem = "figure" + std::to_string(figure);
  std::error_code ec;
  for (const auto& entry : fs::directory_iterator(preset_dir, ec)) {
    const std::string name = entry.path().filename().string();
    if (entry.path().extension() != ".yaml" || name.rfind(stem, 0) != 0) continue;
    const std::string rest = entry.path().stem().string().substr(stem.size());
    if (rest.empty() || (rest.size() == 1 && rest[0] >= 'a' && rest[0] <= 'z')) configs.push_back(entry.path());
  }
  if (ec) {
    std::cerr << "omsolve: cannot read preset directory " << preset_dir << ": " << ec.message() << "\n";
    return OM_ERR_IO;
  }
  if (configs.empty()) {
    std::cerr << "omsolve: no preset for figure " << figure << " in " << preset_dir << "\n";
    return OM_ERR_CONFIG;
  }
  std::sort(configs.begin(), configs.end());
  for (const auto& c : configs) run_one(c.string(), o);
  return 0;
}

int cmd_verify(const Globals& g, const std::string& config, std::size_t trajectories) {
  const auto sys = load_system(config);
  om_verify_options o;
  om_verify_options_init(&o);
  o.seed = g.seed;
  o.threads = g.threads;
  o.rel_tol = g.tol;
  o.trajectories = trajectories;
  char* report = nullptr;
  int ok = 0;
  check(om_verify(sys.get(), &o, &report, &ok));
  std::cout << report;
  om_string_free(report);
  return ok ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Steady-state entanglement and output-field analysis of a driven optomechanical cavity"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(om_version()));
  Globals g;
  app.add_option("--threads", g.threads, "Worker threads")->check(CLI::Range(1u, 1024u));
  auto* tol_opt = app.add_option("--tol", g.tol, "Relative quadrature tolerance")->check(CLI::Range(1e-14, 0.5));
  app.add_option("--seed", g.seed, "Seed for stochastic checks");
  app.add_option("--format", g.format, "Output format")->check(CLI::IsMember({"csv", "json"}));

  const std::string preset_dir = OMSOLVE_PRESET_DIR;
  std::string config = preset_dir + "/system_setB.yaml";
  auto add_config = [&](CLI::App* sub) {
    sub->add_option("--config", config, "System file (YAML)")->capture_default_str();
  };

  auto* steady = app.add_subcommand("steady", "Derived constants, stability and the intracavity covariance matrix");
  add_config(steady);
  std::string method = "lyapunov";
  steady->add_option("--method", method, "lyapunov | spectral | thermal")
      ->check(CLI::IsMember({"lyapunov", "spectral", "thermal"}));

  std::string sweep_config, out_dir = ".";
  bool svg = false;
  auto* sweep = app.add_subcommand("sweep", "Run a parameter sweep described by a config file");
  sweep->add_option("config", sweep_config, "Sweep file (YAML)")->required();
  sweep->add_option("--out", out_dir, "Output directory");
  sweep->add_flag("--svg", svg, "Also render an SVG plot");

  auto* spectrum = app.add_subcommand("spectrum", "Output spectrum of the cavity field");
  add_config(spectrum);
  double from = -2.0, to = 2.0;
  std::size_t count = 401;
  bool thermal = false;
  spectrum->add_option("--from", from, "First frequency (units of omega_m)");
  spectrum->add_option("--to", to, "Last frequency (units of omega_m)");
  spectrum->add_option("--count", count, "Grid points")->check(CLI::Range(std::size_t{1}, std::size_t{10'000'000}));
  spectrum->add_flag("--thermal", thermal, "Frequency-dependent Brownian kernel");

  auto* scan = app.add_subcommand("output-scan", "Mechanics vs one filtered output mode against the filter centre");
  add_config(scan);
  std::vector<std::string> epsilons{"10"};
  std::size_t scan_count = 41;
  scan->add_option("--epsilon", epsilons, "omega_m tau values, e.g. 10 or 10pi")->delimiter(',');
  scan->add_option("--from", from, "First centre (units of omega_m)");
  scan->add_option("--to", to, "Last centre (units of omega_m)");
  scan->add_option("--count", scan_count, "Centres")->check(CLI::Range(std::size_t{1}, std::size_t{100'000}));

  auto* tri = app.add_subcommand("tripartite", "Partial-transpose test of the mechanics, Stokes and anti-Stokes modes");
  add_config(tri);
  std::string tri_eps = "1pi";
  std::vector<double> centers{-1.0, 1.0};
  tri->add_option("--epsilon", tri_eps, "omega_m tau, e.g. 1pi");
  tri->add_option("--centers", centers, "Two filter centres (units of omega_m)")->delimiter(',')->expected(2);

  int figure = 0;
  std::string presets = preset_dir;
  auto* fig = app.add_subcommand("figure", "Run the shipped figure presets");
  fig->add_option("n", figure, "Figure number")->required()->check(CLI::Range(2, 9));
  fig->add_option("--presets", presets, "Preset directory")->capture_default_str();
  fig->add_option("--out", out_dir, "Output directory");
  fig->add_flag("--svg", svg, "Also render SVG plots");

  auto* ver = app.add_subcommand("verify", "Cross-method consistency suite");
  add_config(ver);
  std::size_t trajectories = 20'000;
  ver->add_option("--trajectories", trajectories, "Stochastic ensemble size")
      ->check(CLI::Range(std::size_t{2}, std::size_t{100'000'000}));

  CLI11_PARSE(app, argc, argv);

  try {
    if (*steady) return cmd_steady(g, config, method);
    if (*sweep) return run_one(sweep_config, run_options(g, out_dir, svg, tol_opt->count() > 0));
    if (*spectrum) return cmd_spectrum(g, config, from, to, count, thermal);
    if (*scan) return cmd_output_scan(g, config, epsilons, from, to, scan_count);
    if (*tri) return cmd_tripartite(g, config, tri_eps, centers);
    if (*fig) return cmd_figure(run_options(g, out_dir, svg, tol_opt->count() > 0), figure, presets);
    if (*ver) return cmd_verify(g, config, trajectories);
  } catch (const Failure& f) {
    return static_cast<int>(f.status);
  } catch (const CLI::Error& e) {
    return app.exit(e);
  }
  return 0;
}
