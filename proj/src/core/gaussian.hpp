#pragma once

#include "covariance.hpp"
#include "model.hpp"

#include <Eigen/Dense>

#include <vector>

namespace optomech::gaussian {

// Modes on either side of a cut.
struct Bipartition {
  std::vector<int> left;
  std::vector<int> right;

  // Throws InvalidArgument unless the sides are disjoint, non-empty and
  // cover 0..modes-1.
  void validate(int modes) const;
};

// Direct sum of [[0, 1], [-1, 0]] blocks.
Eigen::MatrixXd symplectic_form(int modes);

// Symplectic eigenvalues (moduli of the eigenvalues of i J V, one per pair),
// ascending.
std::vector<double> symplectic_spectrum(const Eigen::MatrixXd& cm);

// Flips the sign of the momentum rows and columns of the selected modes.
CovarianceMatrix partial_transpose(const CovarianceMatrix& cm, const std::vector<int>& modes);

struct NegativityReport {
  double log_negativity = 0.0;
  double eta_minus = 0.0;      // smallest symplectic eigenvalue after transposition
  bool simon_entangled = false;  // 4 det V < Sigma - 1/4
};

// Two-mode log-negativity from the Sigma/det closed form. Cross-checked
// against the transposed symplectic spectrum to 1e-9.
NegativityReport logarithmic_negativity(const CovarianceMatrix& cm);

// Any cut: sum of -ln(2 nu) over transposed symplectic eigenvalues below 1/2.
double logarithmic_negativity(const CovarianceMatrix& cm, const Bipartition& split);

enum class Sideband { Blue, Red };

// Drift and diffusion of the resonant sideband model in the slowly rotating
// frame (counter-rotating terms dropped).
Eigen::Matrix4d rwa_drift(double coupling, double kappa, double gamma_m, Sideband sideband);
Eigen::Matrix4d rwa_diffusion(double kappa, double gamma_m, double n_bar);

// Closed-form stationary CM of the sideband model. The blue case requires
// G < sqrt(2 kappa gamma_m).
CovarianceMatrix rwa_cm(double coupling, double kappa, double gamma_m, double n_bar, Sideband sideband);

// ln[(1 + G/sqrt(2 kappa gamma_m)) / (1 + n_bar)], clamped at 0.
double rwa_en_bound(double coupling, double kappa, double gamma_m, double n_bar);

// n_eff = (V11 + V22 - 1) / 2 of mode 0.
double effective_occupancy(const CovarianceMatrix& cm);

struct CoolingReport {
  double a_plus = 0.0;   // Stokes scattering rate
  double a_minus = 0.0;  // anti-Stokes scattering rate
  double net_rate = 0.0; // Gamma = A- - A+; negative means heating
  double n_eff_perturbative = 0.0;
  bool perturbative_valid = false;  // gamma_m + Gamma > 0
  double n_eff_exact = 0.0;         // from the Lyapunov CM; NaN when unstable
};

// Rates in units of omega_m.
CoolingReport cooling_rates(const Rates& rates);

}  // namespace optomech::gaussian
