#include "optomech/optomech.h"

#include "config.hpp"
#include "covariance.hpp"
#include "dynamics.hpp"
#include "error.hpp"
#include "gaussian.hpp"
#include "model.hpp"
#include "output.hpp"
#include "sweep.hpp"
#include "tripartite.hpp"
#include "verify.hpp"

#include <cmath>
#include <cstdlib>
#include <cstring>
#include <limits>
#include <optional>
#include <string>

struct om_system {
  optomech::Rates rates;
  std::optional<optomech::model::DerivedParams> derived;
};

struct om_cm {
  optomech::CovarianceMatrix cm;
};

namespace {

thread_local std::string last_error;

om_status fail(om_status status, const std::string& message) {
  last_error = message;
  return status;
}

template <typename F>
om_status guard(F&& body) {
  try {
    body();
    last_error.clear();
    return OM_OK;
  } catch (const optomech::Error& e) {
    return fail(static_cast<om_status>(e.code()), e.what());
  } catch (const std::bad_alloc&) {
    return fail(OM_ERR_INTERNAL, "out of memory");
  } catch (const std::exception& e) {
    return fail(OM_ERR_INTERNAL, e.what());
  }
}

void require(bool condition, const char* message) {
  if (!condition) throw optomech::InvalidArgument(message);
}

om_system* make_system(const optomech::model::SystemParams& params) {
  const auto d = optomech::model::derive_constants(params);
  return new om_system{d.rates(), d};
}

void copy_path(char* dst, const std::string& src) {
  constexpr std::size_t cap = 4096;
  if (src.size() >= cap) throw optomech::Error(optomech::ErrorCode::Io, "path too long: " + src);
  std::memcpy(dst, src.c_str(), src.size() + 1);
}

}  // namespace

extern "C" {

const char* om_version(void) { return optomech::sweep::version; }

const char* om_last_error(void) { return last_error.c_str(); }

const char* om_status_name(om_status status) {
  switch (status) {
    case OM_OK: return "ok";
    case OM_ERR_INVALID_ARGUMENT: return "invalid_argument";
    case OM_ERR_UNSTABLE: return "unstable";
    case OM_ERR_UNPHYSICAL: return "unphysical";
    case OM_ERR_QUADRATURE: return "quadrature";
    case OM_ERR_ORTHOGONALITY: return "orthogonality";
    case OM_ERR_CONFIG: return "config";
    case OM_ERR_IO: return "io";
    case OM_ERR_INTERNAL: return "internal";
  }
  return "unknown";
}

om_status om_system_load(const char* path, om_system** out) {
  return guard([&] {
    require(path && out, "null argument");
    *out = make_system(optomech::config::load_system(path));
  });
}

om_status om_system_parse(const char* yaml_text, om_system** out) {
  return guard([&] {
    require(yaml_text && out, "null argument");
    *out = make_system(optomech::config::parse_system(yaml_text));
  });
}

om_status om_system_from_rates(const om_rates* rates, om_system** out) {
  return guard([&] {
    require(rates && out, "null argument");
    const optomech::Rates r{rates->kappa, rates->gamma_m, rates->coupling, rates->detuning, rates->n_bar,
                            rates->thermal_ratio};
    require(std::isfinite(r.kappa) && r.kappa > 0.0, "kappa must be positive");
    require(std::isfinite(r.gamma_m) && r.gamma_m > 0.0, "gamma_m must be positive");
    require(std::isfinite(r.coupling) && std::isfinite(r.detuning), "coupling and detuning must be finite");
    require(std::isfinite(r.n_bar) && r.n_bar >= 0.0, "n_bar must be non-negative");
    require(r.thermal_ratio > 0.0, "thermal_ratio must be positive (may be +inf)");
    *out = new om_system{r, std::nullopt};
  });
}

void om_system_free(om_system* system) { delete system; }

om_status om_system_derived(const om_system* system, om_derived* out) {
  return guard([&] {
    require(system && out, "null argument");
    const auto& r = system->rates;
    *out = om_derived{};
    out->rates = {r.kappa, r.gamma_m, r.coupling, r.detuning, r.n_bar, r.thermal_ratio};
    if (const auto& d = system->derived) {
      out->omega_m_si = d->omega_m_si;
      out->kappa_si = d->kappa_si;
      out->g0_si = d->g0_si;
      out->coupling_si = d->coupling_si;
      out->detuning_si = d->detuning_si;
      out->detuning0_si = d->detuning0_si;
      out->g0 = d->g0;
      out->alpha_s = d->alpha_s;
    }
  });
}

om_status om_system_stability(const om_system* system, om_stability* out) {
  return guard([&] {
    require(system && out, "null argument");
    const auto rep = optomech::dynamics::stability(optomech::dynamics::build_linear_model(system->rates));
    *out = {rep.stable ? 1 : 0, rep.s1, rep.s2, rep.max_real_part};
  });
}

om_status om_system_cooling(const om_system* system, om_cooling* out) {
  return guard([&] {
    require(system && out, "null argument");
    const auto rep = optomech::gaussian::cooling_rates(system->rates);
    const double nan = std::numeric_limits<double>::quiet_NaN();
    *out = {rep.a_plus, rep.a_minus, rep.net_rate, rep.perturbative_valid ? rep.n_eff_perturbative : nan,
            rep.n_eff_exact};
  });
}

om_status om_steady_cm(const om_system* system, om_cm_method method, double tol, om_cm** out) {
  return guard([&] {
    require(system && out, "null argument");
    const auto model = optomech::dynamics::build_linear_model(system->rates);
    const auto rep = optomech::dynamics::stability(model);
    if (!rep.stable) throw optomech::dynamics::UnstableSystem(rep);
    switch (method) {
      case OM_CM_LYAPUNOV:
        *out = new om_cm{optomech::dynamics::steady_cm_lyapunov(model)};
        return;
      case OM_CM_SPECTRAL_MARKOVIAN:
      case OM_CM_SPECTRAL_THERMAL: {
        require(tol > 0.0 && tol < 1.0, "tolerance must lie in (0, 1)");
        optomech::dynamics::SpectralOptions so;
        so.markovian = method == OM_CM_SPECTRAL_MARKOVIAN;
        so.rel_tol = tol;
        *out = new om_cm{optomech::dynamics::steady_cm_spectral(model, so)};
        return;
      }
    }
    throw optomech::InvalidArgument("unknown method");
  });
}

om_status om_output_cm(const om_system* system, const double* centers, size_t n_centers, double epsilon, double tol,
                       int markovian, om_cm** out) {
  return guard([&] {
    require(system && centers && out, "null argument");
    require(n_centers > 0, "at least one filter centre is needed");
    require(tol > 0.0 && tol < 1.0, "tolerance must lie in (0, 1)");
    const auto bank = optomech::output::make_filter_bank({centers, centers + n_centers}, epsilon);
    optomech::output::OutputOptions oo;
    oo.markovian = markovian != 0;
    oo.rel_tol = tol;
    *out = new om_cm{optomech::output::output_cm(system->rates, bank, oo).cm};
  });
}

void om_cm_free(om_cm* cm) { delete cm; }

size_t om_cm_dim(const om_cm* cm) { return cm ? static_cast<size_t>(cm->cm.dim()) : 0; }

om_status om_cm_get(const om_cm* cm, size_t row, size_t col, double* out) {
  return guard([&] {
    require(cm && out, "null argument");
    const auto n = static_cast<size_t>(cm->cm.dim());
    require(row < n && col < n, "index out of range");
    *out = cm->cm(static_cast<Eigen::Index>(row), static_cast<Eigen::Index>(col));
  });
}

om_status om_cm_copy(const om_cm* cm, double* buffer, size_t length) {
  return guard([&] {
    require(cm && buffer, "null argument");
    const auto n = static_cast<size_t>(cm->cm.dim());
    require(length >= n * n, "buffer too small");
    for (size_t i = 0; i < n; ++i) {
      for (size_t j = 0; j < n; ++j) buffer[i * n + j] = cm->cm(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
    }
  });
}

const char* om_cm_label(const om_cm* cm, size_t mode) {
  if (!cm || mode >= cm->cm.labels().size()) return nullptr;
  return cm->cm.labels()[mode].c_str();
}

om_status om_cm_min_symplectic(const om_cm* cm, double* out) {
  return guard([&] {
    require(cm && out, "null argument");
    *out = optomech::gaussian::symplectic_spectrum(cm->cm.matrix()).front();
  });
}

om_status om_log_negativity(const om_cm* cm, size_t mode_a, size_t mode_b, double* out) {
  return guard([&] {
    require(cm && out, "null argument");
    const auto modes = static_cast<size_t>(cm->cm.modes());
    require(mode_a < modes && mode_b < modes && mode_a != mode_b, "two distinct modes in range are needed");
    const auto pair = cm->cm.select_modes({static_cast<int>(mode_a), static_cast<int>(mode_b)});
    *out = optomech::gaussian::logarithmic_negativity(pair).log_negativity;
  });
}

om_status om_tripartite(const om_cm* cm, double values[3], int* fully_inseparable) {
  return guard([&] {
    require(cm && values && fully_inseparable, "null argument");
    const auto rep = optomech::tripartite::classify_tripartite(cm->cm);
    for (int k = 0; k < 3; ++k) values[k] = rep.cuts[k].value;
    *fully_inseparable = rep.fully_inseparable ? 1 : 0;
  });
}

om_status om_output_spectrum(const om_system* system, const double* omegas, size_t n, int markovian, double* out) {
  return guard([&] {
    require(system && (n == 0 || (omegas && out)), "null argument");
    const auto points = optomech::output::output_spectrum(system->rates, {omegas, omegas + n}, markovian != 0);
    for (size_t i = 0; i < n; ++i) out[i] = points[i].value;
  });
}

void om_run_options_init(om_run_options* options) {
  if (!options) return;
  *options = om_run_options{1, 0.0, 0, OM_FORMAT_CSV, nullptr, 0};
}

om_status om_run_sweep(const char* config_path, const om_run_options* options, om_sweep_summary* out) {
  return guard([&] {
    require(config_path && options && out, "null argument");
    const auto spec = optomech::config::load_sweep(config_path);
    optomech::sweep::RunOptions ro;
    ro.threads = options->threads == 0 ? 1 : options->threads;
    if (options->tolerance > 0.0) ro.tolerance = options->tolerance;
    ro.seed = options->seed;
    ro.format = options->format == OM_FORMAT_JSON ? optomech::sweep::Format::Json : optomech::sweep::Format::Csv;
    ro.output_dir = options->output_dir ? options->output_dir : ".";
    ro.svg = options->svg != 0;
    const auto s = optomech::sweep::run(spec, ro);
    out->points = s.points;
    out->unstable = s.unstable;
    out->failed = s.failed;
    copy_path(out->data_path, s.data_path);
    copy_path(out->provenance_path, s.provenance_path);
    copy_path(out->svg_path, s.svg_path);
  });
}

void om_verify_options_init(om_verify_options* options) {
  if (!options) return;
  const optomech::verify::Options defaults;
  *options = om_verify_options{defaults.seed, defaults.trajectories, defaults.threads, defaults.rel_tol};
}

om_status om_verify(const om_system* system, const om_verify_options* options, char** report, int* all_passed) {
  return guard([&] {
    require(system && options && report && all_passed, "null argument");
    optomech::verify::Options vo;
    vo.seed = options->seed;
    vo.trajectories = options->trajectories;
    vo.threads = options->threads == 0 ? 1 : options->threads;
    vo.rel_tol = options->rel_tol;
    const auto checks = optomech::verify::run(system->rates, vo);
    const std::string text = optomech::verify::format(checks);
    bool ok = true;
    for (const auto& c : checks) ok = ok && c.pass;
    char* buf = static_cast<char*>(std::malloc(text.size() + 1));
    if (!buf) throw std::bad_alloc();
    std::memcpy(buf, text.c_str(), text.size() + 1);
    *report = buf;
    *all_passed = ok ? 1 : 0;
  });
}

void om_string_free(char* text) { std::free(text); }

}  // extern "C"
