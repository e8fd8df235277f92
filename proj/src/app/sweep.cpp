#include "sweep.hpp"

#include "covariance.hpp"
#include "dynamics.hpp"
#include "error.hpp"
#include "gaussian.hpp"
#include "output.hpp"
#include "tripartite.hpp"

#include "json.hpp"

#include <Eigen/Core>
#include <fmt/format.h>

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <ctime>
#include <exception>
#include <filesystem>
#include <fstream>
#include <limits>
#include <thread>

#ifndef OPTOMECH_YAML_CPP_VERSION
#define OPTOMECH_YAML_CPP_VERSION "unknown"
#endif

namespace optomech::sweep {

using config::Observable;
using config::Param;

Cell Cell::of(double v) {
  if (!std::isfinite(v)) return null();
  return {Kind::Number, v, false, {}};
}

namespace {

const char* status_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidArgument: return "invalid_argument";
    case ErrorCode::Unstable: return "unstable";
    case ErrorCode::Unphysical: return "unphysical";
    case ErrorCode::Quadrature: return "quadrature";
    case ErrorCode::Orthogonality: return "orthogonality";
    case ErrorCode::Config: return "config";
    case ErrorCode::Io: return "io";
    case ErrorCode::Internal: return "internal";
  }
  return "internal";
}

std::vector<std::string> axis_columns(Param p) {
  switch (p) {
    case Param::Detuning: return {"detuning_rad_s", "detuning_norm"};
    case Param::BareDetuning: return {"bare_detuning_rad_s", "bare_detuning_norm"};
    case Param::Power: return {"power_W"};
    case Param::Finesse: return {"finesse"};
    case Param::Kappa: return {"kappa_rad_s", "kappa_norm"};
    case Param::Temperature: return {"temperature_K"};
    case Param::Mass: return {"mass_kg"};
    case Param::Quality: return {"quality"};
    case Param::Epsilon: return {"epsilon"};
    case Param::Center: return {"center_rad_s", "center_norm"};
    case Param::Center2: return {"center2_rad_s", "center2_norm"};
    case Param::Omega: return {"omega_rad_s", "omega_norm"};
  }
  return {};
}

const std::vector<std::string> derived_columns{"kappa_rad_s",    "kappa_norm",    "coupling_rad_s", "coupling_norm",
                                               "detuning_rad_s", "detuning_norm", "n_bar"};

std::vector<std::string> observable_columns(Observable o) {
  switch (o) {
    case Observable::Intracavity: return {"en_intracavity", "n_eff"};
    case Observable::Cooling: return {"a_plus", "a_minus", "gamma_net", "n_eff_pert"};
    case Observable::Spectrum: return {"spectrum"};
    case Observable::MechOutput: return {"en_mech_output"};
    case Observable::TwoMode: return {"en_two_mode"};
    case Observable::Tripartite: return {"pt_mechanics", "pt_stokes", "pt_anti_stokes", "fully_inseparable"};
  }
  return {};
}

struct Layout {
  std::vector<std::string> columns;
  std::vector<bool> derived_kept;  // per derived column
  std::size_t first_observable = 0;
};

Layout layout(const config::SweepSpec& spec) {
  Layout l;
  for (const auto& a : spec.axes) {
    for (auto& c : axis_columns(a.param)) l.columns.push_back(std::move(c));
  }
  for (const auto& c : derived_columns) {
    const bool keep = std::find(l.columns.begin(), l.columns.end(), c) == l.columns.end();
    l.derived_kept.push_back(keep);
    if (keep) l.columns.push_back(c);
  }
  l.columns.push_back("stable");
  l.columns.push_back("status");
  l.first_observable = l.columns.size();
  for (Observable o : spec.observables) {
    for (auto& c : observable_columns(o)) l.columns.push_back(std::move(c));
  }
  return l;
}

struct Point {
  model::SystemParams system;
  double epsilon = 0.0;
  double center1 = 0.0;
  double center2 = 0.0;
  double omega = 0.0;
};

void check_physical(const CovarianceMatrix& cm) { cm.require_physical(1e-6, 1e-9); }

std::vector<Cell> evaluate_point(const config::SweepSpec& spec, const Layout& layout, std::size_t index,
                                 double tol) {
  Point pt{spec.system, spec.epsilon, spec.centers[0], spec.centers[1], 0.0};
  std::vector<Cell> row;
  const double wm = spec.system.omega_m;

  // Decompose the flat index, last axis fastest.
  std::vector<std::size_t> idx(spec.axes.size());
  for (std::size_t k = spec.axes.size(); k-- > 0;) {
    idx[k] = index % spec.axes[k].values.size();
    index /= spec.axes[k].values.size();
  }
  for (std::size_t k = 0; k < spec.axes.size(); ++k) {
    const double v = spec.axes[k].values[idx[k]];
    switch (spec.axes[k].param) {
      case Param::Detuning:
        pt.system.detuning = v;
        pt.system.detuning_kind = model::DetuningKind::Effective;
        row.insert(row.end(), {Cell::of(v), Cell::of(v / wm)});
        break;
      case Param::BareDetuning:
        pt.system.detuning = v;
        pt.system.detuning_kind = model::DetuningKind::Bare;
        row.insert(row.end(), {Cell::of(v), Cell::of(v / wm)});
        break;
      case Param::Power: pt.system.power = v; row.push_back(Cell::of(v)); break;
      case Param::Finesse:
        pt.system.finesse = v;
        pt.system.kappa.reset();
        row.push_back(Cell::of(v));
        break;
      case Param::Kappa:
        pt.system.kappa = v;
        pt.system.finesse.reset();
        row.insert(row.end(), {Cell::of(v), Cell::of(v / wm)});
        break;
      case Param::Temperature: pt.system.temperature = v; row.push_back(Cell::of(v)); break;
      case Param::Mass: pt.system.mass = v; row.push_back(Cell::of(v)); break;
      case Param::Quality: pt.system.quality = v; row.push_back(Cell::of(v)); break;
      case Param::Epsilon: pt.epsilon = v; row.push_back(Cell::of(v)); break;
      case Param::Center: pt.center1 = v; row.insert(row.end(), {Cell::of(v * wm), Cell::of(v)}); break;
      case Param::Center2: pt.center2 = v; row.insert(row.end(), {Cell::of(v * wm), Cell::of(v)}); break;
      case Param::Omega: pt.omega = v; row.insert(row.end(), {Cell::of(v * wm), Cell::of(v)}); break;
    }
  }

  const std::size_t derived_at = row.size();
  for (bool keep : layout.derived_kept) {
    if (keep) row.push_back(Cell::null());
  }
  const std::size_t stable_at = row.size();
  row.push_back(Cell::null());
  row.push_back(Cell::null());
  const std::size_t obs_at = row.size();
  row.resize(layout.columns.size());

  auto fail = [&](const std::string& status) {
    std::fill(row.begin() + static_cast<std::ptrdiff_t>(obs_at), row.end(), Cell::null());
    row[stable_at + 1] = Cell::of(status);
  };

  model::DerivedParams d;
  try {
    d = model::derive_constants(pt.system);
  } catch (const Error& e) {
    fail(status_name(e.code()));
    return row;
  }
  const double derived[] = {d.kappa_si, d.kappa, d.coupling_si, d.coupling, d.detuning_si, d.detuning, d.n_bar};
  std::size_t w = derived_at;
  for (std::size_t i = 0; i < layout.derived_kept.size(); ++i) {
    if (layout.derived_kept[i]) row[w++] = Cell::of(derived[i]);
  }

  const Rates rates = d.rates();
  const auto linear = dynamics::build_linear_model(rates);
  bool stable = false;
  try {
    stable = dynamics::stability(linear).stable;
  } catch (const Error& e) {
    row[stable_at] = Cell::null();
    fail(status_name(e.code()));
    return row;
  }
  row[stable_at] = Cell::of(stable);
  if (!stable) {
    fail("unstable");
    return row;
  }

  try {
    output::OutputOptions oo;
    oo.markovian = spec.markovian;
    oo.rel_tol = tol;
    std::size_t c = obs_at;
    for (Observable o : spec.observables) {
      switch (o) {
        case Observable::Intracavity: {
          const CovarianceMatrix cm =
              spec.markovian ? dynamics::steady_cm_lyapunov(linear)
                             : dynamics::steady_cm_spectral(linear, {false, tol, 4'000'000});
          check_physical(cm);
          row[c++] = Cell::of(gaussian::logarithmic_negativity(cm).log_negativity);
          row[c++] = Cell::of(gaussian::effective_occupancy(cm));
          break;
        }
        case Observable::Cooling: {
          const auto rep = gaussian::cooling_rates(rates);
          row[c++] = Cell::of(rep.a_plus);
          row[c++] = Cell::of(rep.a_minus);
          row[c++] = Cell::of(rep.net_rate);
          row[c++] = rep.perturbative_valid ? Cell::of(rep.n_eff_perturbative) : Cell::null();
          break;
        }
        case Observable::Spectrum:
          row[c++] = Cell::of(output::output_spectrum(rates, {pt.omega}, spec.markovian).front().value);
          break;
        case Observable::MechOutput: {
          const auto out = output::output_cm(rates, output::make_filter_bank({pt.center1}, pt.epsilon), oo);
          check_physical(out.cm);
          row[c++] = Cell::of(gaussian::logarithmic_negativity(out.cm).log_negativity);
          break;
        }
        case Observable::TwoMode: {
          const auto out =
              output::output_cm(rates, output::make_filter_bank({pt.center1, pt.center2}, pt.epsilon), oo);
          check_physical(out.cm);
          row[c++] = Cell::of(gaussian::logarithmic_negativity(out.cm.select_modes({1, 2})).log_negativity);
          break;
        }
        case Observable::Tripartite: {
          const auto out =
              output::output_cm(rates, output::make_filter_bank({pt.center1, pt.center2}, pt.epsilon), oo);
          check_physical(out.cm);
          const auto rep = tripartite::classify_tripartite(out.cm);
          for (const auto& cut : rep.cuts) row[c++] = Cell::of(cut.value);
          row[c++] = Cell::of(rep.fully_inseparable);
          break;
        }
      }
    }
    row[stable_at + 1] = Cell::of(std::string("ok"));
  } catch (const Error& e) {
    fail(status_name(e.code()));
  } catch (const std::exception&) {
    fail("internal");
  }
  return row;
}

std::string format_number(double v) { return fmt::format("{}", v); }

std::string csv_field(const Cell& cell) {
  switch (cell.kind) {
    case Cell::Kind::Null: return {};
    case Cell::Kind::Number: return format_number(cell.number);
    case Cell::Kind::Bool: return cell.flag ? "true" : "false";
    case Cell::Kind::Text: return cell.text;
  }
  return {};
}

nlohmann::ordered_json json_value(const Cell& cell) {
  switch (cell.kind) {
    case Cell::Kind::Null: return nullptr;
    case Cell::Kind::Number: return cell.number;
    case Cell::Kind::Bool: return cell.flag;
    case Cell::Kind::Text: return cell.text;
  }
  return nullptr;
}

std::string utc_timestamp() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

void write_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  out << text;
  if (!out) throw Error(ErrorCode::Io, "cannot write " + path.string());
}

}  // namespace

Table evaluate(const config::SweepSpec& spec, const RunOptions& options) {
  if (spec.axes.empty()) throw ConfigError("axes must be a non-empty list", 0, "axes");
  const std::size_t n = spec.grid_size();
  if (n > spec.max_points) {
    throw ConfigError("grid has " + std::to_string(n) + " points, above max_points = " +
                          std::to_string(spec.max_points),
                      0, "max_points");
  }
  const double tol = options.tolerance.value_or(spec.tolerance);
  if (!(tol > 0.0 && tol < 1.0)) throw InvalidArgument("tolerance must lie in (0, 1)");

  const Layout l = layout(spec);
  Table table;
  table.columns = l.columns;
  table.rows.resize(n);

  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < n; i = next++) table.rows[i] = evaluate_point(spec, l, i, tol);
  };
  const unsigned threads = std::max(1u, std::min<unsigned>(options.threads, static_cast<unsigned>(std::min<std::size_t>(n, 1024))));
  if (threads == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }

  const std::size_t status_col = l.first_observable - 1;
  for (const auto& row : table.rows) {
    const std::string& s = row[status_col].text;
    if (s == "unstable") ++table.unstable;
    else if (s != "ok") ++table.failed;
  }
  return table;
}

std::string to_csv(const Table& table) {
  std::string out;
  for (std::size_t i = 0; i < table.columns.size(); ++i) out += (i ? "," : "") + table.columns[i];
  out += '\n';
  for (const auto& row : table.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (i) out += ',';
      out += csv_field(row[i]);
    }
    out += '\n';
  }
  return out;
}

std::string to_json(const Table& table) {
  nlohmann::ordered_json records = nlohmann::ordered_json::array();
  for (const auto& row : table.rows) {
    nlohmann::ordered_json rec;
    for (std::size_t i = 0; i < row.size(); ++i) rec[table.columns[i]] = json_value(row[i]);
    records.push_back(std::move(rec));
  }
  return records.dump(1) + "\n";
}

std::string provenance(const config::SweepSpec& spec, const RunOptions& options, const Table& table,
                       const std::string& output_file) {
  nlohmann::ordered_json j;
  j["name"] = spec.name;
  j["tool"] = "omsolve";
  j["output_file"] = output_file;
  j["format"] = options.format == Format::Csv ? "csv" : "json";
  j["config_path"] = spec.source_path;
  j["config_text"] = spec.source_text;
  j["seed"] = options.seed;
  j["threads"] = options.threads;
  j["tolerance"] = options.tolerance.value_or(spec.tolerance);
  j["markovian"] = spec.markovian;
  j["epsilon"] = spec.epsilon;
  j["centers_norm"] = spec.centers;
  j["conventions"] = {
      {"covariance", CovarianceMatrix::convention},
      {"frequencies", "normalized columns (_norm) are in units of omega_m and are contractual; SI columns in rad/s"},
      {"fourier", "f(w) = int dt e^{iwt} f(t); spectral integrals carry dw/2pi"},
      {"kappa", "cavity amplitude decay rate, kappa = pi c / (L F)"},
      {"spectrum", "normal-ordered <da^dag da>(w) in the frame rotating at the laser; Stokes sideband at w = -omega_m"},
      {"epsilon", "omega_m tau, filter duration times mechanical frequency"},
      {"pt_columns", "smallest symplectic eigenvalue of the partially transposed CM minus 1/2; negative means NPT"},
      {"null", "empty CSV cell or JSON null: observable not evaluated (unstable or failed point)"},
  };
  j["versions"] = {
      {"optomech", version},
      {"eigen", fmt::format("{}.{}.{}", EIGEN_WORLD_VERSION, EIGEN_MAJOR_VERSION, EIGEN_MINOR_VERSION)},
      {"fmt", fmt::format("{}.{}.{}", FMT_VERSION / 10000, FMT_VERSION / 100 % 100, FMT_VERSION % 100)},
      {"nlohmann_json", fmt::format("{}.{}.{}", NLOHMANN_JSON_VERSION_MAJOR, NLOHMANN_JSON_VERSION_MINOR,
                                    NLOHMANN_JSON_VERSION_PATCH)},
      {"yaml_cpp", OPTOMECH_YAML_CPP_VERSION},
      {"compiler", __VERSION__},
  };
  nlohmann::ordered_json axes = nlohmann::ordered_json::array();
  for (const auto& a : spec.axes) axes.push_back({{"param", config::param_name(a.param)}, {"count", a.values.size()}});
  nlohmann::ordered_json observables = nlohmann::ordered_json::array();
  for (Observable o : spec.observables) observables.push_back(config::observable_name(o));
  j["grid"] = {{"axes", axes}, {"points", table.rows.size()}, {"max_points", spec.max_points}};
  j["observables"] = observables;
  j["columns"] = table.columns;
  j["summary"] = {{"unstable", table.unstable}, {"failed", table.failed}};
  j["created_utc"] = utc_timestamp();
  return j.dump(2) + "\n";
}

namespace {

struct Series {
  std::string name;
  std::vector<double> y;  // NaN for nulls
};

double cell_value(const Cell& c) {
  if (c.kind == Cell::Kind::Number) return c.number;
  return std::numeric_limits<double>::quiet_NaN();
}

// Column shown on a plot axis for a swept parameter: the normalized one when
// present.
std::size_t axis_column(const config::SweepSpec& spec, std::size_t axis) {
  std::size_t col = 0;
  for (std::size_t k = 0; k <= axis; ++k) col += axis_columns(spec.axes[k].param).size();
  return col - 1;
}

std::string svg_text(double x, double y, const std::string& text, const char* anchor = "middle") {
  return fmt::format("<text x=\"{:.1f}\" y=\"{:.1f}\" font-size=\"12\" text-anchor=\"{}\">{}</text>\n", x, y, anchor,
                     text);
}

std::string color(double t) {
  // Dark blue to yellow through teal.
  t = std::clamp(t, 0.0, 1.0);
  const double stops[3][3] = {{68, 1, 84}, {33, 145, 140}, {253, 231, 37}};
  const int i = t < 0.5 ? 0 : 1;
  const double s = t < 0.5 ? t * 2.0 : (t - 0.5) * 2.0;
  int rgb[3];
  for (int k = 0; k < 3; ++k) rgb[k] = static_cast<int>(std::lround(stops[i][k] + s * (stops[i + 1][k] - stops[i][k])));
  return fmt::format("#{:02x}{:02x}{:02x}", rgb[0], rgb[1], rgb[2]);
}

}  // namespace

std::string render_svg(const config::SweepSpec& spec, const Table& table) {
  if (table.rows.empty() || spec.axes.empty() || spec.axes.size() > 2) return {};
  const std::size_t first_obs = std::find(table.columns.begin(), table.columns.end(), "status") - table.columns.begin() + 1;
  std::vector<Series> series;
  for (std::size_t c = first_obs; c < table.columns.size(); ++c) {
    if (table.rows.front()[c].kind == Cell::Kind::Bool) continue;
    Series s{table.columns[c], {}};
    bool any = false;
    for (const auto& row : table.rows) {
      const bool boolean = row[c].kind == Cell::Kind::Bool;
      s.y.push_back(boolean ? std::numeric_limits<double>::quiet_NaN() : cell_value(row[c]));
      any = any || std::isfinite(s.y.back());
    }
    if (any) series.push_back(std::move(s));
  }
  if (series.empty()) return {};

  const double width = 640, height = 420, left = 70, right = 170, top = 30, bottom = 50;
  const double pw = width - left - right, ph = height - top - bottom;
  std::string svg = fmt::format(
      "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{}\" height=\"{}\" viewBox=\"0 0 {} {}\">\n"
      "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n",
      width, height, width, height);
  svg += svg_text(width / 2, 18, spec.name);

  auto range = [](const std::vector<double>& v) {
    double lo = std::numeric_limits<double>::infinity(), hi = -lo;
    for (double x : v) {
      if (std::isfinite(x)) {
        lo = std::min(lo, x);
        hi = std::max(hi, x);
      }
    }
    if (!(hi > lo)) {
      lo -= 0.5;
      hi += 0.5;
    }
    return std::pair{lo, hi};
  };

  const std::size_t xc = axis_column(spec, spec.axes.size() == 1 ? 0 : 1);
  std::vector<double> xs;
  for (const auto& row : table.rows) xs.push_back(cell_value(row[xc]));
  const auto [x0, x1] = range(xs);

  if (spec.axes.size() == 1) {
    double y0 = std::numeric_limits<double>::infinity(), y1 = -y0;
    for (const auto& s : series) {
      const auto [lo, hi] = range(s.y);
      y0 = std::min(y0, lo);
      y1 = std::max(y1, hi);
    }
    auto px = [&](double x) { return left + (x - x0) / (x1 - x0) * pw; };
    auto py = [&](double y) { return top + ph - (y - y0) / (y1 - y0) * ph; };
    svg += fmt::format("<rect x=\"{}\" y=\"{}\" width=\"{}\" height=\"{}\" fill=\"none\" stroke=\"black\"/>\n", left,
                       top, pw, ph);
    static constexpr const char* palette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"};
    for (std::size_t k = 0; k < series.size(); ++k) {
      const char* stroke = palette[k % 6];
      std::string points;
      auto flush = [&] {
        if (!points.empty()) {
          svg += fmt::format("<polyline fill=\"none\" stroke=\"{}\" stroke-width=\"1.5\" points=\"{}\"/>\n", stroke,
                             points);
        }
        points.clear();
      };
      for (std::size_t i = 0; i < xs.size(); ++i) {
        if (!std::isfinite(series[k].y[i]) || !std::isfinite(xs[i])) {
          flush();
          continue;
        }
        points += fmt::format("{:.2f},{:.2f} ", px(xs[i]), py(series[k].y[i]));
      }
      flush();
      svg += fmt::format("<line x1=\"{}\" y1=\"{}\" x2=\"{}\" y2=\"{}\" stroke=\"{}\" stroke-width=\"2\"/>\n",
                         left + pw + 10, top + 10 + 18 * k, left + pw + 30, top + 10 + 18 * k, stroke);
      svg += svg_text(left + pw + 35, top + 14 + 18 * k, series[k].name, "start");
    }
    svg += svg_text(left - 5, top + ph, fmt::format("{:.4g}", y0), "end");
    svg += svg_text(left - 5, top + 10, fmt::format("{:.4g}", y1), "end");
  } else {
    const std::size_t yc = axis_column(spec, 0);
    const std::size_t ny = spec.axes[0].values.size(), nx = spec.axes[1].values.size();
    std::vector<double> ys;
    for (const auto& row : table.rows) ys.push_back(cell_value(row[yc]));
    const auto [v0, v1] = range(series.front().y);
    const double cw = pw / static_cast<double>(nx), ch = ph / static_cast<double>(ny);
    for (std::size_t r = 0; r < ny; ++r) {
      for (std::size_t c = 0; c < nx; ++c) {
        const double v = series.front().y[r * nx + c];
        const std::string fill = std::isfinite(v) ? color((v - v0) / (v1 - v0)) : std::string("#bbbbbb");
        svg += fmt::format("<rect x=\"{:.2f}\" y=\"{:.2f}\" width=\"{:.2f}\" height=\"{:.2f}\" fill=\"{}\"/>\n",
                           left + c * cw, top + ph - (r + 1) * ch, cw + 0.05, ch + 0.05, fill);
      }
    }
    const auto [yy0, yy1] = range(ys);
    svg += svg_text(left - 5, top + ph, fmt::format("{:.4g}", yy0), "end");
    svg += svg_text(left - 5, top + 10, fmt::format("{:.4g}", yy1), "end");
    svg += svg_text(18, top + ph / 2, table.columns[yc]);
    for (int k = 0; k <= 10; ++k) {
      svg += fmt::format("<rect x=\"{}\" y=\"{:.1f}\" width=\"20\" height=\"{:.1f}\" fill=\"{}\"/>\n", left + pw + 20,
                         top + ph - (k + 1) * ph / 11, ph / 11 + 0.05, color(k / 10.0));
    }
    svg += svg_text(left + pw + 45, top + ph, fmt::format("{:.4g}", v0), "start");
    svg += svg_text(left + pw + 45, top + 10, fmt::format("{:.4g}", v1), "start");
    svg += svg_text(left + pw + 60, top + ph / 2, series.front().name, "start");
  }
  svg += svg_text(left, top + ph + 18, fmt::format("{:.4g}", x0), "start");
  svg += svg_text(left + pw, top + ph + 18, fmt::format("{:.4g}", x1), "end");
  svg += svg_text(left + pw / 2, top + ph + 36, table.columns[xc]);
  svg += "</svg>\n";
  return svg;
}

RunSummary run(const config::SweepSpec& spec, const RunOptions& options) {
  const Table table = evaluate(spec, options);
  const std::filesystem::path dir(options.output_dir);
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw Error(ErrorCode::Io, "cannot create " + dir.string() + ": " + ec.message());

  RunSummary s;
  const std::string data_name = spec.name + (options.format == Format::Csv ? ".csv" : ".json");
  s.data_path = (dir / data_name).string();
  s.provenance_path = (dir / (spec.name + ".provenance.json")).string();
  write_file(s.data_path, options.format == Format::Csv ? to_csv(table) : to_json(table));
  write_file(s.provenance_path, provenance(spec, options, table, data_name));
  if (options.svg) {
    const std::string svg = render_svg(spec, table);
    if (!svg.empty()) {
      s.svg_path = (dir / (spec.name + ".svg")).string();
      write_file(s.svg_path, svg);
    }
  }
  s.points = table.rows.size();
  s.unstable = table.unstable;
  s.failed = table.failed;
  return s;
}

}  // namespace optomech::sweep
