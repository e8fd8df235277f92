#pragma once

#include "covariance.hpp"
#include "error.hpp"
#include "model.hpp"

#include <Eigen/Dense>

#include <cstddef>
#include <vector>

namespace optomech::dynamics {

// Linearized fluctuation model, basis (dq, dp, dX, dY), frequencies in units
// of omega_m.
struct LinearModel {
  Eigen::Matrix4d drift;
  Eigen::Matrix4d diffusion;  // Markovian: diag(0, gamma_m (2 n_bar + 1), kappa, kappa)
  Rates rates;

  // Frequency-dependent diffusion with the thermal kernel in slot (1, 1).
  Eigen::Matrix4d diffusion_at(double omega) const;
};

// gamma_m * omega * coth(hbar omega / 2 k_B T), continued by its limit at 0.
double thermal_kernel(const Rates& rates, double omega);

LinearModel build_linear_model(const Rates& rates);

struct StabilityReport {
  double s1 = 0.0;
  double s2 = 0.0;
  double max_real_part = 0.0;
  bool stable = false;
};

class UnstableSystem : public Error {
 public:
  explicit UnstableSystem(const StabilityReport& report);
  const StabilityReport& report() const noexcept { return report_; }

 private:
  StabilityReport report_;
};

// Routh-Hurwitz conditions cross-checked against the eigenvalues of the
// drift matrix. Marginal cases count as unstable; a genuine disagreement
// throws InternalInconsistency.
StabilityReport stability(const LinearModel& model);

// Solves A V + V A^T = -D for symmetric V via the n(n+1)/2 vectorized system.
Eigen::MatrixXd solve_lyapunov(const Eigen::MatrixXd& drift, const Eigen::MatrixXd& diffusion);

CovarianceMatrix steady_cm_lyapunov(const LinearModel& model);

struct SpectralOptions {
  bool markovian = true;
  double rel_tol = 1e-8;
  std::size_t max_evaluations = 4'000'000;
};

// V = int domega/2pi M(omega) D(omega) M(omega)^dagger, M = (i omega + A)^-1.
CovarianceMatrix steady_cm_spectral(const LinearModel& model, const SpectralOptions& options = {});

// Quadrature breakpoints clustered on the resonances of a stable drift
// matrix: for every eigenvalue -w + i c, points at c + w * {0, +-1/2, +-2, +-8, +-32}.
std::vector<double> resonance_breakpoints(const Eigen::MatrixXd& drift);

// Window half-width beyond which the tails are mapped: 40 max(1, kappa, |Delta|).
double spectral_cutoff(const Rates& rates);

}  // namespace optomech::dynamics
