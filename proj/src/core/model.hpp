#pragma once

#include <optional>
#include <vector>

namespace optomech {

namespace constants {
inline constexpr double hbar = 1.054571817e-34;    // J s
inline constexpr double k_boltzmann = 1.380649e-23;  // J/K
inline constexpr double speed_of_light = 299792458.0;  // m/s
}  // namespace constants

// Rates of the linearized problem in units of the mechanical frequency.
// This is the form consumed by every solver; SI values only exist at the
// configuration boundary.
struct Rates {
  double kappa = 0.0;     // cavity amplitude decay
  double gamma_m = 0.0;   // mechanical damping
  double coupling = 0.0;  // effective optomechanical coupling G
  double detuning = 0.0;  // effective detuning Delta
  double n_bar = 0.0;     // mean thermal phonon number
  // hbar*omega_m/(k_B T); +infinity at zero temperature.
  double thermal_ratio = 0.0;
};

namespace model {

enum class DetuningKind { Effective, Bare };

struct SystemParams {
  double omega_m = 0.0;      // rad/s
  double quality = 0.0;      // Q, gamma_m = omega_m / Q
  double mass = 0.0;         // kg
  double length = 0.0;       // m
  std::optional<double> finesse;
  std::optional<double> kappa;  // rad/s, alternative to finesse
  double wavelength = 0.0;   // m
  double power = 0.0;        // W
  double detuning = 0.0;     // rad/s, meaning set by detuning_kind
  DetuningKind detuning_kind = DetuningKind::Effective;
  double temperature = 0.0;  // K

  // Throws InvalidArgument naming the first offending field.
  void validate() const;
};

// Derived constants. SI fields carry the _si suffix; unsuffixed rates are
// normalized by omega_m.
struct DerivedParams {
  double omega_m_si = 0.0;
  double omega_0_si = 0.0;  // laser angular frequency
  double kappa_si = 0.0;
  double gamma_m_si = 0.0;
  double g0_si = 0.0;       // bare coupling
  double drive_si = 0.0;    // |E|
  double coupling_si = 0.0; // G
  double detuning_si = 0.0; // effective Delta
  double detuning0_si = 0.0; // bare Delta0

  double alpha_s = 0.0;  // stationary intracavity amplitude (real, >= 0)
  double q_s = 0.0;      // static mechanical displacement
  double n_bar = 0.0;
  double thermal_ratio = 0.0;

  double kappa = 0.0;
  double gamma_m = 0.0;
  double g0 = 0.0;
  double drive = 0.0;
  double coupling = 0.0;
  double detuning = 0.0;
  double detuning0 = 0.0;

  Rates rates() const;
};

struct SteadyBranch {
  double alpha_s_sq = 0.0;
  double effective_detuning = 0.0;  // rad/s
  bool stable = false;
};

double thermal_occupancy(double omega, double temperature);

// kappa = pi c / (L F).
double kappa_from_finesse(double length, double finesse);

DerivedParams derive_constants(const SystemParams& params);

// Real roots of the steady-state cubic in |alpha_s|^2, ascending. Requires
// the bare-detuning form of the parameters.
std::vector<SteadyBranch> classical_steady_state(const SystemParams& params);

// Same cubic in normalized units (rates and drive over omega_m). Handles the
// degenerate undriven (drive = 0) and uncoupled (g0 = 0) cases. Branch
// detunings are normalized and `stable` is left unset.
std::vector<SteadyBranch> steady_state_branches(double kappa, double detuning0, double g0,
                                                double drive);

}  // namespace model
}  // namespace optomech
