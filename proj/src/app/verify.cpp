#include "verify.hpp"

#include "dynamics.hpp"
#include "error.hpp"
#include "gaussian.hpp"
#include "oracle.hpp"
#include "output.hpp"

#include <fmt/format.h>

#include <cmath>
#include <limits>
#include <numbers>

namespace optomech::verify {

double relative_gap(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols() || a.rows() != a.cols()) {
    throw InvalidArgument("relative_gap needs square matrices of equal size");
  }
  double gap = 0.0;
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index j = 0; j < a.cols(); ++j) {
      const double scale = std::sqrt(std::abs(a(i, i) * a(j, j)));
      const double diff = std::abs(a(i, j) - b(i, j));
      if (scale > 0.0) gap = std::max(gap, diff / scale);
      else if (diff > 0.0) gap = std::max(gap, diff);
    }
  }
  return gap;
}

namespace {

template <typename F>
Check guarded(const std::string& name, double tolerance, F&& body) {
  Check c{name, false, 0.0, tolerance, {}};
  try {
    body(c);
    c.pass = std::isfinite(c.achieved) && c.achieved <= tolerance;
  } catch (const std::exception& e) {
    c.pass = false;
    c.achieved = std::numeric_limits<double>::quiet_NaN();
    c.detail = std::string("error: ") + e.what();
  }
  return c;
}

}  // namespace

std::vector<Check> run(const Rates& rates, const Options& options) {
  const auto linear = dynamics::build_linear_model(rates);
  const auto report = dynamics::stability(linear);
  if (!report.stable) throw dynamics::UnstableSystem(report);
  const Eigen::MatrixXd lyapunov = dynamics::steady_cm_lyapunov(linear).matrix();

  std::vector<Check> checks;
  checks.push_back(guarded("lyapunov_vs_spectral", 1e-6, [&](Check& c) {
    const auto spectral = dynamics::steady_cm_spectral(linear, {true, options.rel_tol, 4'000'000});
    c.achieved = relative_gap(lyapunov, spectral.matrix());
    c.detail = "max relative gap, Markovian noise";
  }));

  checks.push_back(guarded("markovian_vs_thermal_kernel", 1e-2, [&](Check& c) {
    const auto spectral = dynamics::steady_cm_spectral(linear, {false, options.rel_tol, 4'000'000});
    c.achieved = relative_gap(lyapunov, spectral.matrix());
    c.detail = fmt::format("max relative gap, hbar omega_m / k_B T = {:.4g}", rates.thermal_ratio);
  }));

  checks.push_back(guarded("rwa_closed_form_vs_lyapunov", 1e-10, [&](Check& c) {
    double worst = 0.0;
    const double kappa = rates.kappa, gamma = rates.gamma_m, n_bar = rates.n_bar;
    for (auto sb : {gaussian::Sideband::Red, gaussian::Sideband::Blue}) {
      // The blue case is stable only below sqrt(2 kappa gamma_m).
      const double g = sb == gaussian::Sideband::Red ? rates.coupling : 0.5 * std::sqrt(2.0 * kappa * gamma);
      const auto closed = gaussian::rwa_cm(g, kappa, gamma, n_bar, sb).matrix();
      const Eigen::MatrixXd numeric = dynamics::solve_lyapunov(gaussian::rwa_drift(g, kappa, gamma, sb),
                                                               gaussian::rwa_diffusion(kappa, gamma, n_bar));
      worst = std::max(worst, relative_gap(numeric, closed));
    }
    c.achieved = worst;
    c.detail = "red at the operating G, blue at half the stability bound";
  }));

  checks.push_back(guarded("oracle_vs_lyapunov", 3.0, [&](Check& c) {
    oracle::Options oo;
    oo.threads = options.threads;
    const auto est = oracle::simulate_ensemble(linear, 0.0, 0.0, options.trajectories, options.seed, oo);
    double worst = 0.0;
    for (Eigen::Index i = 0; i < 4; ++i) {
      for (Eigen::Index j = i; j < 4; ++j) {
        const double se = est.standard_error(i, j);
        worst = std::max(worst, std::abs(est.cm(i, j) - lyapunov(i, j)) / se);
      }
    }
    c.achieved = worst;
    c.detail = fmt::format("max |z| over entries; {} trajectories, {} steps, seed {}", est.trajectories, est.steps,
                           est.seed);
  }));

  checks.push_back(guarded("flat_noise_identity", 1e-4, [&](Check& c) {
    const auto bank = output::make_filter_bank({-1.0, 1.0}, 10.0 * std::numbers::pi);
    const auto ext = output::build_extended_model(rates, bank);
    const Eigen::MatrixXd term = output::flat_noise_term(rates, bank);
    c.achieved = (term - 0.5 * ext.out_projector).cwiseAbs().maxCoeff();
    c.detail = "max |term - P_out/2|, centres -1 and 1, epsilon 10 pi";
  }));

  checks.push_back(guarded("filter_orthonormality", 1e-10, [&](Check& c) {
    const auto bank = output::make_filter_bank({-1.0, 0.0, 1.0}, 2.0 * std::numbers::pi);
    c.achieved = std::max(bank.max_overlap(), bank.max_norm_error());
    c.detail = "centres -1, 0, 1 at epsilon 2 pi";
  }));

  checks.push_back(guarded("output_cm_physicality", 1e-6, [&](Check& c) {
    const auto bank = output::make_filter_bank({-1.0, 1.0}, 10.0 * std::numbers::pi);
    output::OutputOptions oo;
    oo.rel_tol = options.rel_tol;
    const auto out = output::output_cm(rates, bank, oo);
    const double nu = gaussian::symplectic_spectrum(out.cm.matrix()).front();
    c.achieved = std::max(0.0, 0.5 - nu);
    c.detail = fmt::format("smallest symplectic eigenvalue {:.12g}", nu);
  }));
  return checks;
}

std::string format(const std::vector<Check>& checks) {
  std::string out;
  for (const auto& c : checks) {
    out += fmt::format("{} {} achieved={:.3e} tolerance={:.1e}", c.pass ? "PASS" : "FAIL", c.name, c.achieved,
                       c.tolerance);
    if (!c.detail.empty()) out += " (" + c.detail + ")";
    out += '\n';
  }
  return out;
}

}  // namespace optomech::verify
