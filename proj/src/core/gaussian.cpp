#include "gaussian.hpp"

#include "dynamics.hpp"
#include "error.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>
#include <string>

namespace optomech::gaussian {

void Bipartition::validate(int modes) const {
  if (left.empty() || right.empty()) throw InvalidArgument("both sides of a bipartition must be non-empty");
  std::set<int> seen;
  for (int m : left) seen.insert(m);
  for (int m : right) {
    if (seen.count(m)) throw InvalidArgument("bipartition sides overlap at mode " + std::to_string(m));
    seen.insert(m);
  }
  if (static_cast<int>(seen.size()) != static_cast<int>(left.size() + right.size()) ||
      static_cast<int>(seen.size()) != modes || *seen.begin() != 0 || *seen.rbegin() != modes - 1) {
    throw InvalidArgument("bipartition must cover every mode exactly once");
  }
}

Eigen::MatrixXd symplectic_form(int modes) {
  Eigen::MatrixXd J = Eigen::MatrixXd::Zero(2 * modes, 2 * modes);
  for (int k = 0; k < modes; ++k) {
    J(2 * k, 2 * k + 1) = 1.0;
    J(2 * k + 1, 2 * k) = -1.0;
  }
  return J;
}

std::vector<double> symplectic_spectrum(const Eigen::MatrixXd& cm) {
  const auto modes = static_cast<int>(cm.rows() / 2);
  const Eigen::MatrixXd sym = 0.5 * (cm + cm.transpose());
  const Eigen::MatrixXd JV = symplectic_form(modes) * sym;
  // Eigenvalues of J V come as +-i nu.
  const Eigen::VectorXcd eig = JV.eigenvalues();
  std::vector<double> moduli(eig.size());
  for (Eigen::Index i = 0; i < eig.size(); ++i) moduli[i] = std::abs(eig[i]);
  std::sort(moduli.begin(), moduli.end());
  std::vector<double> nu(modes);
  for (int k = 0; k < modes; ++k) nu[k] = 0.5 * (moduli[2 * k] + moduli[2 * k + 1]);
  return nu;
}

CovarianceMatrix partial_transpose(const CovarianceMatrix& cm, const std::vector<int>& modes) {
  Eigen::VectorXd signs = Eigen::VectorXd::Ones(cm.dim());
  for (int m : modes) {
    if (m < 0 || m >= cm.modes()) throw InvalidArgument("mode index out of range");
    signs(2 * m + 1) = -1.0;
  }
  Eigen::MatrixXd out = signs.asDiagonal() * cm.matrix() * signs.asDiagonal();
  return CovarianceMatrix(std::move(out), cm.labels());
}

NegativityReport logarithmic_negativity(const CovarianceMatrix& cm) {
  if (cm.modes() != 2) throw InvalidArgument("two-mode covariance matrix expected");
  const Eigen::MatrixXd& V = cm.matrix();
  const double det_m = V.block<2, 2>(0, 0).determinant();
  const double det_c = V.block<2, 2>(2, 2).determinant();
  const double det_mc = V.block<2, 2>(0, 2).determinant();
  const double det_v = V.determinant();
  const double sigma = det_m + det_c - 2.0 * det_mc;

  double disc = sigma * sigma - 4.0 * det_v;
  if (disc < -1e-10 * sigma * sigma) {
    throw UnphysicalState("Sigma^2 < 4 det V in log-negativity (" + std::to_string(disc) + ")");
  }
  disc = std::max(disc, 0.0);
  NegativityReport rep;
  // eta-^2 eta+^2 = det V avoids the cancellation in (Sigma - sqrt(disc)) / 2.
  const double big = sigma + std::sqrt(disc);
  rep.eta_minus = big > 0.0 ? std::sqrt(std::max(2.0 * det_v / big, 0.0)) : 0.0;
  rep.log_negativity = std::max(0.0, -std::log(2.0 * rep.eta_minus));
  rep.simon_entangled = 4.0 * det_v < sigma - 0.25;

  const double nu = symplectic_spectrum(partial_transpose(cm, {1}).matrix()).front();
  if (std::abs(nu - rep.eta_minus) > 1e-9 * std::max(1.0, nu)) {
    throw InternalInconsistency("closed-form eta- " + std::to_string(rep.eta_minus) +
                                " disagrees with transposed spectrum " + std::to_string(nu));
  }
  return rep;
}

double logarithmic_negativity(const CovarianceMatrix& cm, const Bipartition& split) {
  split.validate(static_cast<int>(cm.modes()));
  double en = 0.0;
  for (double nu : symplectic_spectrum(partial_transpose(cm, split.left).matrix())) {
    if (nu < 0.5) en -= std::log(2.0 * nu);
  }
  return en;
}

Eigen::Matrix4d rwa_drift(double G, double kappa, double gamma_m, Sideband sideband) {
  const double s = sideband == Sideband::Blue ? 1.0 : -1.0;
  const double h = 0.5 * G;
  Eigen::Matrix4d A;
  A << -0.5 * gamma_m, 0.0, 0.0, s * h,
       0.0, -0.5 * gamma_m, h, 0.0,
       0.0, s * h, -kappa, 0.0,
       h, 0.0, 0.0, -kappa;
  return A;
}

Eigen::Matrix4d rwa_diffusion(double kappa, double gamma_m, double n_bar) {
  const double thermal = gamma_m * (n_bar + 0.5);
  return Eigen::Vector4d(thermal, thermal, kappa, kappa).asDiagonal();
}

CovarianceMatrix rwa_cm(double G, double kappa, double gamma_m, double n_bar, Sideband sideband) {
  const double s = sideband == Sideband::Blue ? 1.0 : -1.0;
  const double denominator_rate = 2.0 * gamma_m * kappa - s * G * G;
  if (sideband == Sideband::Blue && !(denominator_rate > 0.0)) {
    throw dynamics::UnstableSystem(dynamics::StabilityReport{denominator_rate, 1.0, 0.0, false});
  }
  const double den = (gamma_m + 2.0 * kappa) * denominator_rate;
  const double v11 = n_bar + 0.5 + 2.0 * G * G * kappa * (0.5 + s * (n_bar + 0.5)) / den;
  const double v33 = 0.5 + G * G * gamma_m * (n_bar + 0.5 + 0.5 * s) / den;
  const double v14 = 2.0 * G * gamma_m * kappa * (n_bar + 0.5 + 0.5 * s) / den;
  Eigen::Matrix4d V;
  V << v11, 0.0, 0.0, v14,
       0.0, v11, s * v14, 0.0,
       0.0, s * v14, v33, 0.0,
       v14, 0.0, 0.0, v33;
  return CovarianceMatrix(V, {"mechanics", "cavity"});
}

double rwa_en_bound(double G, double kappa, double gamma_m, double n_bar) {
  return std::max(0.0, std::log((1.0 + G / std::sqrt(2.0 * kappa * gamma_m)) / (1.0 + n_bar)));
}

double effective_occupancy(const CovarianceMatrix& cm) {
  return 0.5 * (cm(0, 0) + cm(1, 1) - 1.0);
}

CoolingReport cooling_rates(const Rates& r) {
  CoolingReport rep;
  const double k2 = r.kappa * r.kappa;
  const double strength = 0.5 * r.coupling * r.coupling * r.kappa;
  rep.a_plus = strength / (k2 + (r.detuning + 1.0) * (r.detuning + 1.0));
  rep.a_minus = strength / (k2 + (r.detuning - 1.0) * (r.detuning - 1.0));
  rep.net_rate = rep.a_minus - rep.a_plus;
  const double effective_damping = r.gamma_m + rep.net_rate;
  rep.perturbative_valid = effective_damping > 0.0;
  rep.n_eff_perturbative = rep.perturbative_valid
                               ? (r.gamma_m * r.n_bar + rep.a_plus) / effective_damping
                               : std::numeric_limits<double>::quiet_NaN();
  const auto model = dynamics::build_linear_model(r);
  rep.n_eff_exact = dynamics::stability(model).stable
                        ? effective_occupancy(dynamics::steady_cm_lyapunov(model))
                        : std::numeric_limits<double>::quiet_NaN();
  return rep;
}


}  // namespace optomech::gaussian
