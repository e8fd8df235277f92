#pragma once

#include "covariance.hpp"
#include "error.hpp"
#include "model.hpp"

#include <Eigen/Dense>

#include <complex>
#include <cstddef>
#include <optional>
#include <vector>

namespace optomech::output {

// Causal step filter of duration tau centred at Omega (rotating frame,
// units of omega_m). g(t) = exp(-i Omega t) / sqrt(tau) on [0, tau].
struct FilterMode {
  double center = 0.0;
  double tau = 1.0;

  double epsilon() const noexcept { return tau; }  // omega_m tau with omega_m = 1
  // sqrt(tau/2pi) exp(i (w - Omega) tau/2) sinc((w - Omega) tau/2)
  std::complex<double> response(double omega) const;
  // Quadrature-form transfer int_0^tau exp(i w s) R(s) ds, where R(s) is the
  // rotation by Omega s scaled by 1/sqrt(tau).
  Eigen::Matrix2cd quadrature_response(double omega) const;
};

class OrthogonalityError : public Error {
 public:
  OrthogonalityError(std::size_t first, std::size_t second, double detail);
  std::size_t first() const noexcept { return first_; }
  std::size_t second() const noexcept { return second_; }

 private:
  std::size_t first_;
  std::size_t second_;
};

class FilterBank {
 public:
  FilterBank() = default;
  const std::vector<FilterMode>& modes() const noexcept { return modes_; }
  std::size_t size() const noexcept { return modes_.size(); }
  double tau() const noexcept { return tau_; }
  // Largest |int g_j^* g_k| over j != k, and largest |int |g_k|^2 - 1|.
  double max_overlap() const noexcept { return max_overlap_; }
  double max_norm_error() const noexcept { return max_norm_error_; }

 private:
  friend FilterBank make_filter_bank(const std::vector<double>&, double);
  std::vector<FilterMode> modes_;
  double tau_ = 0.0;
  double max_overlap_ = 0.0;
  double max_norm_error_ = 0.0;
};

// Time-domain overlap int g_j^*(t) g_k(t) dt by quadrature.
std::complex<double> filter_overlap(const FilterMode& a, const FilterMode& b);

// Requires every pair of centres to be separated by a nonzero integer
// multiple of 2 pi / tau (checked analytically and by quadrature).
FilterBank make_filter_bank(const std::vector<double>& centers, double tau);

// Cavity block copied once per filter. The copies share their input noise,
// so each reproduces the intracavity field; only the first copy acts back on
// the mechanics.
struct ExtendedModel {
  Rates rates;
  FilterBank bank;
  Eigen::MatrixXd drift;      // (2N+2) square
  Eigen::MatrixXd diffusion;  // Markovian
  Eigen::MatrixXd out_projector;  // P_out: identity on the filter blocks
  Eigen::MatrixXd cross_noise;    // R_out = P_out D / kappa

  Eigen::MatrixXd diffusion_at(double omega) const;
  // Block-diagonal transfer: identity on the mechanics, sqrt(2 kappa) times
  // the quadrature response on each filter block.
  Eigen::MatrixXcd transfer(double omega) const;
};

ExtendedModel build_extended_model(const Rates& rates, const FilterBank& bank);

struct OutputOptions {
  bool markovian = true;
  double rel_tol = 1e-8;
  std::size_t max_evaluations = 20'000'000;
  bool commutator = false;  // also assemble the commutator matrix
};

struct OutputCovariance {
  CovarianceMatrix cm;  // (mechanics, filter 1, ..., filter N)
  // i <[u_j, u_k]>; should equal the symplectic form. Only set on request.
  std::optional<Eigen::MatrixXd> commutator;
  std::size_t evaluations = 0;
  double achieved_rel_error = 0.0;
};

// Stationary covariance of the mechanics together with the filtered output
// modes. Throws UnstableSystem or QuadratureError.
OutputCovariance output_cm(const Rates& rates, const FilterBank& bank, const OutputOptions& options = {});

// Quadrature of the flat-noise term alone; equals P_out / 2 analytically.
Eigen::MatrixXd flat_noise_term(const Rates& rates, const FilterBank& bank, double rel_tol = 1e-6);

struct SpectrumPoint {
  double omega = 0.0;
  double value = 0.0;
};

// Normal-ordered intracavity photon-number fluctuation spectrum
// <da^dag(w) da(w)>, da = (dX + i dY)/sqrt(2); zero without coupling.
// Negative omega is the Stokes side.
std::vector<SpectrumPoint> output_spectrum(const Rates& rates, const std::vector<double>& omega_grid,
                                           bool markovian = true);

struct ScanPoint {
  double epsilon = 0.0;
  double center = 0.0;
  double log_negativity = 0.0;
};

// Mechanics versus one filtered output mode, for every (epsilon, Omega).
std::vector<ScanPoint> mech_output_entanglement_scan(const Rates& rates, const std::vector<double>& epsilons,
                                                     const std::vector<double>& centers,
                                                     const OutputOptions& options = {});

// Log-negativity between two filtered output modes (mechanics discarded).
double two_mode_output_entanglement(const Rates& rates, double center1, double center2, double tau,
                                    const OutputOptions& options = {});

}  // namespace optomech::output
