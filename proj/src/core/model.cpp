#include "model.hpp"

#include "dynamics.hpp"
#include "error.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

namespace optomech {

Rates model::DerivedParams::rates() const {
  return Rates{kappa, gamma_m, coupling, detuning, n_bar, thermal_ratio};
}

namespace model {
namespace {

void require_positive(double value, const char* field) {
  if (!(value > 0.0) || !std::isfinite(value)) {
    throw InvalidArgument(std::string(field) + " must be finite and strictly positive");
  }
}

}  // namespace

void SystemParams::validate() const {
  require_positive(omega_m, "omega_m");
  require_positive(mass, "mass");
  require_positive(length, "length");
  require_positive(wavelength, "wavelength");
  require_positive(power, "power");
  require_positive(temperature, "temperature");
  if (!(quality >= 1.0) || !std::isfinite(quality)) {
    throw InvalidArgument("quality must be finite and >= 1");
  }
  if (finesse.has_value() == kappa.has_value()) {
    throw InvalidArgument("exactly one of finesse and kappa must be given");
  }
  if (finesse) require_positive(*finesse, "finesse");
  if (kappa) require_positive(*kappa, "kappa");
  if (!std::isfinite(detuning)) throw InvalidArgument("detuning must be finite");
}

double thermal_occupancy(double omega, double temperature) {
  if (temperature <= 0.0) return 0.0;
  const double x = constants::hbar * omega / (constants::k_boltzmann * temperature);
  if (x > 700.0) return 0.0;
  return 1.0 / std::expm1(x);
}

double kappa_from_finesse(double length, double finesse) {
  return std::numbers::pi * constants::speed_of_light / (length * finesse);
}

namespace {

struct Normalized {
  double kappa;
  double g0;
  double drive;
};

Normalized normalized_inputs(const SystemParams& p, double& omega_0, double& kappa_si, double& g0_si,
                             double& drive_si) {
  omega_0 = 2.0 * std::numbers::pi * constants::speed_of_light / p.wavelength;
  kappa_si = p.finesse ? kappa_from_finesse(p.length, *p.finesse) : *p.kappa;
  // omega_c ~ omega_0 in the amplitude prefactors.
  g0_si = (omega_0 / p.length) * std::sqrt(constants::hbar / (p.mass * p.omega_m));
  drive_si = std::sqrt(2.0 * p.power * kappa_si / (constants::hbar * omega_0));
  return {kappa_si / p.omega_m, g0_si / p.omega_m, drive_si / p.omega_m};
}

}  // namespace

std::vector<SteadyBranch> classical_steady_state(const SystemParams& params) {
  params.validate();
  if (params.detuning_kind != DetuningKind::Bare) {
    throw InvalidArgument("classical_steady_state needs the bare detuning Delta0");
  }
  double omega_0, kappa_si, g0_si, drive_si;
  const Normalized n = normalized_inputs(params, omega_0, kappa_si, g0_si, drive_si);
  auto branches = steady_state_branches(n.kappa, params.detuning / params.omega_m, n.g0, n.drive);
  const double gamma_m = 1.0 / params.quality;
  const double n_bar = thermal_occupancy(params.omega_m, params.temperature);
  for (auto& b : branches) {
    Rates r{n.kappa, gamma_m, std::sqrt(2.0 * b.alpha_s_sq) * n.g0, b.effective_detuning, n_bar, 0.0};
    b.stable = dynamics::stability(dynamics::build_linear_model(r)).stable;
    b.effective_detuning *= params.omega_m;
  }
  return branches;
}

std::vector<SteadyBranch> steady_state_branches(double kappa, double detuning0, double g0,
                                                double drive) {
  std::vector<SteadyBranch> out;
  const double e2 = drive * drive;
  if (e2 == 0.0) {
    out.push_back({0.0, detuning0, false});
    return out;
  }
  const double c = g0 * g0;
  if (c == 0.0) {
    out.push_back({e2 / (kappa * kappa + detuning0 * detuning0), detuning0, false});
    return out;
  }
  // z = c |alpha_s|^2 is the radiation-pressure detuning shift:
  //   z^3 - 2 d0 z^2 + (k^2 + d0^2) z - c e^2 = 0
  const double a2 = -2.0 * detuning0;
  const double a1 = kappa * kappa + detuning0 * detuning0;
  const double a0 = -c * e2;
  Eigen::Matrix3d companion;
  companion << 0.0, 0.0, -a0,
               1.0, 0.0, -a1,
               0.0, 1.0, -a2;
  const Eigen::Vector3cd roots = companion.eigenvalues();
  const double scale = std::max({1.0, kappa, std::abs(detuning0), roots.cwiseAbs().maxCoeff()});

  auto f = [&](double z) { return ((z + a2) * z + a1) * z + a0; };
  auto df = [&](double z) { return (3.0 * z + 2.0 * a2) * z + a1; };

  std::vector<double> zs;
  for (int i = 0; i < 3; ++i) {
    if (std::abs(roots[i].imag()) > 1e-9 * scale) continue;
    double z = roots[i].real();
    for (int it = 0; it < 8; ++it) {
      const double d = df(z);
      if (d == 0.0) break;
      const double step = f(z) / d;
      z -= step;
      if (std::abs(step) <= 1e-16 * std::max(1.0, std::abs(z))) break;
    }
    zs.push_back(std::max(z, 0.0));
  }
  std::sort(zs.begin(), zs.end());
  zs.erase(std::unique(zs.begin(), zs.end(),
                       [&](double x, double y) { return std::abs(x - y) <= 1e-9 * scale; }),
           zs.end());
  for (double z : zs) out.push_back({z / c, detuning0 - z, false});
  return out;
}

DerivedParams derive_constants(const SystemParams& params) {
  params.validate();
  DerivedParams d;
  const double wm = params.omega_m;
  const Normalized n = normalized_inputs(params, d.omega_0_si, d.kappa_si, d.g0_si, d.drive_si);
  d.omega_m_si = wm;
  d.gamma_m_si = wm / params.quality;

  if (params.detuning_kind == DetuningKind::Effective) {
    d.detuning_si = params.detuning;
    const double delta = params.detuning / wm;
    d.alpha_s = n.drive / std::sqrt(n.kappa * n.kappa + delta * delta);
    // G = (2 omega_0 / L) sqrt(P kappa / (m omega_m omega_0 (kappa^2 + Delta^2)))
    d.coupling_si = (2.0 * d.omega_0_si / params.length) *
                    std::sqrt(params.power * d.kappa_si /
                              (params.mass * wm * d.omega_0_si *
                               (d.kappa_si * d.kappa_si + params.detuning * params.detuning)));
  } else {
    const auto branches = classical_steady_state(params);
    // Lowest-intensity stable branch; the lowest branch if none is stable.
    const auto it = std::find_if(branches.begin(), branches.end(), [](const auto& b) { return b.stable; });
    const SteadyBranch& b = it != branches.end() ? *it : branches.front();
    d.alpha_s = std::sqrt(b.alpha_s_sq);
    d.detuning_si = b.effective_detuning;
    d.coupling_si = std::sqrt(2.0) * d.g0_si * d.alpha_s;
  }

  d.detuning0_si = d.detuning_si + d.g0_si * d.g0_si * d.alpha_s * d.alpha_s / wm;
  d.q_s = d.g0_si * d.alpha_s * d.alpha_s / wm;
  d.n_bar = thermal_occupancy(wm, params.temperature);
  d.thermal_ratio = constants::hbar * wm / (constants::k_boltzmann * params.temperature);

  d.kappa = n.kappa;
  d.gamma_m = 1.0 / params.quality;
  d.g0 = n.g0;
  d.drive = n.drive;
  d.coupling = d.coupling_si / wm;
  d.detuning = d.detuning_si / wm;
  d.detuning0 = d.detuning0_si / wm;
  return d;
}

}  // namespace model
}  // namespace optomech
