#include "dynamics.hpp"

#include "quadrature.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <numbers>
#include <string>

namespace optomech::dynamics {

double thermal_kernel(const Rates& r, double omega) {
  const double theta = r.thermal_ratio;
  if (!std::isfinite(theta) || theta > 1e300) return r.gamma_m * std::abs(omega);
  const double x = 0.5 * theta * omega;
  if (std::abs(x) < 1e-6) return r.gamma_m * (2.0 / theta + theta * omega * omega / 6.0);
  return r.gamma_m * omega / std::tanh(x);
}

Eigen::Matrix4d LinearModel::diffusion_at(double omega) const {
  Eigen::Matrix4d d = diffusion;
  d(1, 1) = thermal_kernel(rates, omega);
  return d;
}

LinearModel build_linear_model(const Rates& r) {
  LinearModel m;
  m.rates = r;
  const double k = r.kappa, g = r.gamma_m, G = r.coupling, D = r.detuning;
  m.drift << 0.0, 1.0, 0.0, 0.0,
             -1.0, -g, G, 0.0,
             0.0, 0.0, -k, D,
             G, 0.0, -D, -k;
  m.diffusion = Eigen::Vector4d(0.0, g * (2.0 * r.n_bar + 1.0), k, k).asDiagonal();
  return m;
}

UnstableSystem::UnstableSystem(const StabilityReport& report)
    : Error(ErrorCode::Unstable, "system is unstable (s1=" + std::to_string(report.s1) +
                                     ", s2=" + std::to_string(report.s2) +
                                     ", max Re(eig)=" + std::to_string(report.max_real_part) + ")"),
      report_(report) {}

StabilityReport stability(const LinearModel& model) {
  const Rates& r = model.rates;
  const double k = r.kappa, g = r.gamma_m, G = r.coupling, D = r.detuning;
  const double k2 = k * k;

  StabilityReport rep;
  const double sideband = (k2 + (1.0 - D) * (1.0 - D)) * (k2 + (1.0 + D) * (1.0 + D));
  const double damping = g * ((g + 2.0 * k) * (k2 + D * D) + 2.0 * k);
  const double drive = D * G * G * (g + 2.0 * k) * (g + 2.0 * k);
  rep.s1 = 2.0 * g * k * (sideband + damping) + drive;
  rep.s2 = (k2 + D * D) - G * G * D;

  const Eigen::Vector4cd eig = model.drift.eigenvalues();
  rep.max_real_part = eig.real().maxCoeff();

  const bool by_eigenvalues = rep.max_real_part < -1e-12;
  const bool by_routh_hurwitz = rep.s1 > 0.0 && rep.s2 > 0.0;
  rep.stable = by_eigenvalues && by_routh_hurwitz;
  if (by_eigenvalues != by_routh_hurwitz) {
    const double scale1 = 2.0 * g * k * (sideband + std::abs(damping)) + std::abs(drive);
    const double scale2 = (k2 + D * D) + G * G * std::abs(D);
    const double margin = std::min(std::abs(rep.s1) / scale1, std::abs(rep.s2) / scale2);
    const double rate_scale = std::max({1.0, k, std::abs(D), G});
    if (margin > 1e-8 && std::abs(rep.max_real_part) > 1e-8 * rate_scale) {
      throw InternalInconsistency("Routh-Hurwitz and eigenvalue stability verdicts disagree (s1=" +
                                  std::to_string(rep.s1) + ", s2=" + std::to_string(rep.s2) +
                                  ", max Re(eig)=" + std::to_string(rep.max_real_part) + ")");
    }
  }
  return rep;
}

Eigen::MatrixXd solve_lyapunov(const Eigen::MatrixXd& A, const Eigen::MatrixXd& D) {
  const Eigen::Index n = A.rows();
  const Eigen::Index m = n * (n + 1) / 2;
  auto index = [n](Eigen::Index i, Eigen::Index j) {
    if (i > j) std::swap(i, j);
    return i * n - i * (i - 1) / 2 + (j - i);
  };

  Eigen::MatrixXd system = Eigen::MatrixXd::Zero(m, m);
  Eigen::VectorXd rhs(m);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = i; j < n; ++j) {
      const Eigen::Index row = index(i, j);
      rhs(row) = -0.5 * (D(i, j) + D(j, i));
      for (Eigen::Index k = 0; k < n; ++k) {
        system(row, index(k, j)) += A(i, k);
        system(row, index(i, k)) += A(j, k);
      }
    }
  }

  const Eigen::FullPivLU<Eigen::MatrixXd> lu(system);
  if (!lu.isInvertible()) throw InternalInconsistency("Lyapunov operator is singular");
  Eigen::VectorXd x = lu.solve(rhs);
  // One step of iterative refinement.
  x += lu.solve(rhs - system * x);

  Eigen::MatrixXd V(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j) V(i, j) = x(index(i, j));
  return V;
}

CovarianceMatrix steady_cm_lyapunov(const LinearModel& model) {
  const StabilityReport rep = stability(model);
  if (!rep.stable) throw UnstableSystem(rep);
  const Eigen::Matrix4d V = solve_lyapunov(model.drift, model.diffusion);
  const double residual = (model.drift * V + V * model.drift.transpose() + model.diffusion).norm();
  // Backward error: relative to the size of the terms that cancel.
  const double scale = std::max(model.diffusion.norm(), 2.0 * model.drift.norm() * V.norm());
  if (residual > 1e-10 * scale) {
    throw InternalInconsistency("Lyapunov residual " + std::to_string(residual) + " exceeds tolerance");
  }
  return CovarianceMatrix(V, {"mechanics", "cavity"});
}

std::vector<double> resonance_breakpoints(const Eigen::MatrixXd& drift) {
  std::vector<double> points{0.0};
  const Eigen::VectorXcd eig = drift.eigenvalues();
  for (const auto& lambda : eig) {
    // Pole of (i omega + A)^-1 at omega = i lambda: peak at -Im(lambda).
    const double center = -lambda.imag();
    const double width = std::max(std::abs(lambda.real()), 1e-12);
    points.push_back(center);
    for (double f : {0.5, 2.0, 8.0, 32.0}) {
      points.push_back(center - f * width);
      points.push_back(center + f * width);
    }
  }
  return points;
}

double spectral_cutoff(const Rates& r) {
  return 40.0 * std::max({1.0, r.kappa, std::abs(r.detuning)});
}

CovarianceMatrix steady_cm_spectral(const LinearModel& model, const SpectralOptions& options) {
  const StabilityReport rep = stability(model);
  if (!rep.stable) throw UnstableSystem(rep);

  const Eigen::Matrix4cd A = model.drift.cast<std::complex<double>>();
  auto integrand = [&](double omega) -> Eigen::VectorXd {
    Eigen::Matrix4cd shifted = A;
    shifted.diagonal().array() += std::complex<double>(0.0, omega);
    const Eigen::Matrix4cd M = shifted.inverse();
    const Eigen::Matrix4d D = options.markovian ? model.diffusion : model.diffusion_at(omega);
    const Eigen::Matrix4d S = (M * D * M.adjoint()).real() / (2.0 * std::numbers::pi);
    return Eigen::Map<const Eigen::VectorXd>(S.data(), 16);
  };

  std::vector<double> points = resonance_breakpoints(model.drift);
  const double window = 3.0 * std::max({1.0, model.rates.kappa, std::abs(model.rates.detuning)});
  for (double w = -window; w <= window; w += 0.25 * window / 3.0) points.push_back(w);

  numeric::QuadratureOptions qopt;
  qopt.rel_tol = options.rel_tol;
  qopt.max_evaluations = options.max_evaluations;
  const auto scale = [](const Eigen::VectorXd& v) {
    Eigen::VectorXd s(16);
    for (int j = 0; j < 4; ++j)
      for (int i = 0; i < 4; ++i) s(i + 4 * j) = std::sqrt(std::abs(v(i + 4 * i) * v(j + 4 * j)));
    return s;
  };
  const auto res = numeric::integrate_real_line(integrand, points, spectral_cutoff(model.rates), 16, qopt, scale);
  if (!res.converged) {
    throw QuadratureError("steady_cm_spectral did not converge", res.achieved * options.rel_tol);
  }
  Eigen::Matrix4d V = Eigen::Map<const Eigen::Matrix4d>(res.value.data());
  V = 0.5 * (V + V.transpose()).eval();
  return CovarianceMatrix(V, {"mechanics", "cavity"});
}

}  // namespace optomech::dynamics
