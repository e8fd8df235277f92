#include "output.hpp"

#include "dynamics.hpp"
#include "gaussian.hpp"
#include "quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

namespace optomech::output {

namespace {

using cd = std::complex<double>;
constexpr double two_pi = 2.0 * std::numbers::pi;

// (1/sqrt(tau)) int_0^tau exp(i x s) ds
cd window_transform(double x, double tau) {
  const double h = 0.5 * x * tau;
  const double sinc = std::abs(h) < 1e-8 ? 1.0 - h * h / 6.0 : std::sin(h) / h;
  return std::sqrt(tau) * std::polar(1.0, h) * sinc;
}

// Breakpoints shared by every filtered integrand: the system resonances, a
// uniform grid over the resonance window and fine clusters around +-Omega_k.
std::vector<double> filter_breakpoints(const Eigen::MatrixXd& drift, const Rates& r, const FilterBank& bank,
                                       double cutoff) {
  std::vector<double> points = dynamics::resonance_breakpoints(drift);
  const double scale = std::max({1.0, r.kappa, std::abs(r.detuning)});
  for (double w = -3.0 * scale; w <= 3.0 * scale + 1e-12; w += 0.25 * scale) points.push_back(w);
  const double tau = bank.tau();
  const double half = 20.0 * std::numbers::pi / tau;
  const double step = 0.5 * std::numbers::pi / tau;
  for (const auto& mode : bank.modes()) {
    for (double center : {mode.center, -mode.center}) {
      const double lo = std::max(center - half, -cutoff);
      const double hi = std::min(center + half, cutoff);
      for (double w = lo; w <= hi + 1e-12 * step; w += step) points.push_back(w);
    }
  }
  return points;
}

Eigen::MatrixXd filter_symplectic_form(Eigen::Index n) {
  Eigen::MatrixXd J = gaussian::symplectic_form(static_cast<int>(n / 2));
  J.topLeftCorner<2, 2>().setZero();
  return J;
}

}  // namespace

cd FilterMode::response(double omega) const {
  return window_transform(omega - center, tau) / std::sqrt(two_pi);
}

Eigen::Matrix2cd FilterMode::quadrature_response(double omega) const {
  const cd plus = window_transform(omega + center, tau);
  const cd minus = window_transform(omega - center, tau);
  const cd c = 0.5 * (plus + minus);
  const cd s = (plus - minus) / cd(0.0, 2.0);
  Eigen::Matrix2cd r;
  r << c, s, -s, c;
  return r;
}

OrthogonalityError::OrthogonalityError(std::size_t first, std::size_t second, double detail)
    : Error(ErrorCode::Orthogonality, "filters " + std::to_string(first) + " and " + std::to_string(second) +
                                          " are not orthogonal ((Omega_j - Omega_k) tau / 2pi = " +
                                          std::to_string(detail) + ")"),
      first_(first),
      second_(second) {}

std::complex<double> filter_overlap(const FilterMode& a, const FilterMode& b) {
  if (a.tau != b.tau) throw InvalidArgument("filters must share one duration");
  const double tau = a.tau;
  const double beat = a.center - b.center;
  // g_a^* g_b = exp(i (Omega_a - Omega_b) t) / tau
  auto integrand = [&](double t) -> Eigen::VectorXd {
    return Eigen::Vector2d(std::cos(beat * t), std::sin(beat * t)) / tau;
  };
  const int panels = 1 + static_cast<int>(std::ceil(std::abs(beat) * tau / std::numbers::pi));
  std::vector<double> points;
  for (int i = 0; i <= panels; ++i) points.push_back(tau * i / panels);
  numeric::QuadratureOptions opt;
  opt.rel_tol = 1e-14;
  opt.abs_tol = 1e-15;
  const auto res = numeric::integrate(integrand, points, 2, opt);
  return {res.value(0), res.value(1)};
}

FilterBank make_filter_bank(const std::vector<double>& centers, double tau) {
  if (!(tau > 0.0) || !std::isfinite(tau)) throw InvalidArgument("filter duration must be positive");
  if (centers.empty()) throw InvalidArgument("filter bank needs at least one mode");
  FilterBank bank;
  bank.tau_ = tau;
  for (double c : centers) {
    if (!std::isfinite(c)) throw InvalidArgument("filter centre must be finite");
    bank.modes_.push_back({c, tau});
  }
  for (std::size_t j = 0; j < centers.size(); ++j) {
    bank.max_norm_error_ =
        std::max(bank.max_norm_error_, std::abs(filter_overlap(bank.modes_[j], bank.modes_[j]) - 1.0));
    for (std::size_t k = j + 1; k < centers.size(); ++k) {
      const double p = (centers[j] - centers[k]) * tau / two_pi;
      const double nearest = std::round(p);
      if (nearest == 0.0 || std::abs(p - nearest) > 1e-9 * std::max(1.0, std::abs(p))) {
        throw OrthogonalityError(j, k, p);
      }
      const double overlap = std::abs(filter_overlap(bank.modes_[j], bank.modes_[k]));
      if (overlap >= 1e-10) throw OrthogonalityError(j, k, p);
      bank.max_overlap_ = std::max(bank.max_overlap_, overlap);
    }
  }
  return bank;
}

Eigen::MatrixXd ExtendedModel::diffusion_at(double omega) const {
  Eigen::MatrixXd d = diffusion;
  d(1, 1) = dynamics::thermal_kernel(rates, omega);
  return d;
}

Eigen::MatrixXcd ExtendedModel::transfer(double omega) const {
  const Eigen::Index n = drift.rows();
  Eigen::MatrixXcd t = Eigen::MatrixXcd::Zero(n, n);
  t(0, 0) = 1.0;
  t(1, 1) = 1.0;
  const double gain = std::sqrt(2.0 * rates.kappa);
  for (std::size_t k = 0; k < bank.size(); ++k) {
    t.block<2, 2>(2 + 2 * k, 2 + 2 * k) = gain * bank.modes()[k].quadrature_response(omega);
  }
  return t;
}

ExtendedModel build_extended_model(const Rates& r, const FilterBank& bank) {
  if (bank.size() == 0) throw InvalidArgument("empty filter bank");
  ExtendedModel m;
  m.rates = r;
  m.bank = bank;
  const auto copies = static_cast<Eigen::Index>(bank.size());
  const Eigen::Index n = 2 * copies + 2;
  m.drift = Eigen::MatrixXd::Zero(n, n);
  m.diffusion = Eigen::MatrixXd::Zero(n, n);
  m.out_projector = Eigen::MatrixXd::Zero(n, n);

  m.drift(0, 1) = 1.0;
  m.drift(1, 0) = -1.0;
  m.drift(1, 1) = -r.gamma_m;
  m.drift(1, 2) = r.coupling;
  m.diffusion(1, 1) = r.gamma_m * (2.0 * r.n_bar + 1.0);
  for (Eigen::Index c = 0; c < copies; ++c) {
    const Eigen::Index o = 2 + 2 * c;
    m.drift(o, o) = -r.kappa;
    m.drift(o, o + 1) = r.detuning;
    m.drift(o + 1, o) = -r.detuning;
    m.drift(o + 1, o + 1) = -r.kappa;
    m.drift(o + 1, 0) = r.coupling;
    m.out_projector(o, o) = 1.0;
    m.out_projector(o + 1, o + 1) = 1.0;
    for (Eigen::Index d = 0; d < copies; ++d) {
      const Eigen::Index p = 2 + 2 * d;
      m.diffusion(o, p) = r.kappa;
      m.diffusion(o + 1, p + 1) = r.kappa;
    }
  }
  m.cross_noise = m.out_projector * m.diffusion / r.kappa;
  return m;
}

OutputCovariance output_cm(const Rates& r, const FilterBank& bank, const OutputOptions& options) {
  const auto report = dynamics::stability(dynamics::build_linear_model(r));
  if (!report.stable) throw dynamics::UnstableSystem(report);

  const ExtendedModel ext = build_extended_model(r, bank);
  const Eigen::Index n = ext.drift.rows();
  const Eigen::Index entries = n * n;
  const Eigen::MatrixXcd drift = ext.drift.cast<cd>();
  const Eigen::MatrixXd& P = ext.out_projector;

  // Imaginary part of the optical input correlations, kappa [[0, 1], [-1, 0]]
  // on every pair of copies.
  Eigen::MatrixXd optical_commutator = Eigen::MatrixXd::Zero(n, n);
  for (Eigen::Index o = 2; o < n; o += 2)
    for (Eigen::Index p = 2; p < n; p += 2) {
      optical_commutator(o, p + 1) = r.kappa;
      optical_commutator(o + 1, p) = -r.kappa;
    }

  const Eigen::Index dim = options.commutator ? 2 * entries : entries;
  auto evaluate = [&](double omega) -> Eigen::VectorXd {
    Eigen::MatrixXcd shifted = drift;
    shifted.diagonal().array() += cd(0.0, omega);
    const Eigen::MatrixXcd M = shifted.partialPivLu().inverse();
    Eigen::MatrixXcd C = (options.markovian ? ext.diffusion : ext.diffusion_at(omega)).cast<cd>();
    if (options.commutator) {
      C(1, 1) += r.gamma_m * omega;
      C += cd(0.0, 1.0) * optical_commutator.cast<cd>();
    }
    const Eigen::MatrixXcd C_out = P * C * P;
    const Eigen::MatrixXcd inner =
        M * C * M.adjoint() + (M * C_out + C_out * M.adjoint()) / (2.0 * r.kappa);
    const Eigen::MatrixXcd T = ext.transfer(omega);
    const Eigen::MatrixXcd K = T * inner * T.adjoint() / two_pi;
    Eigen::VectorXd out(dim);
    for (Eigen::Index j = 0; j < n; ++j)
      for (Eigen::Index i = 0; i < n; ++i) {
        out(i + n * j) = K(i, j).real();
        if (options.commutator) out(entries + i + n * j) = K(i, j).imag();
      }
    return out;
  };
  // The odd Brownian term makes single entries decay only as 1/omega with
  // odd parity; pairing omega with -omega cancels them pointwise.
  auto integrand = [&](double omega) -> Eigen::VectorXd {
    if (!options.commutator) return evaluate(omega);
    return 0.5 * (evaluate(omega) + evaluate(-omega));
  };

  const double tau = bank.tau();
  double max_center = 0.0;
  for (const auto& m : bank.modes()) max_center = std::max(max_center, std::abs(m.center));
  const double cutoff = std::max(dynamics::spectral_cutoff(r), max_center + 20.0 * std::numbers::pi / tau);
  const std::vector<double> points = filter_breakpoints(ext.drift, r, bank, cutoff);

  auto scale = [&](const Eigen::VectorXd& v) {
    Eigen::VectorXd diag(n);
    for (Eigen::Index i = 0; i < n; ++i) diag(i) = std::abs(v(i + n * i)) + 0.5 * P(i, i);
    Eigen::VectorXd s(dim);
    for (Eigen::Index j = 0; j < n; ++j)
      for (Eigen::Index i = 0; i < n; ++i) {
        s(i + n * j) = std::sqrt(diag(i) * diag(j));
        if (options.commutator) s(entries + i + n * j) = std::max(s(i + n * j), 0.5);
      }
    return s;
  };

  numeric::QuadratureOptions qopt;
  qopt.rel_tol = options.rel_tol;
  qopt.max_evaluations = options.max_evaluations;
  const auto res = numeric::integrate_real_line(integrand, points, cutoff, dim, qopt, scale);
  if (!res.converged) throw QuadratureError("output_cm did not converge", res.achieved * options.rel_tol);

  Eigen::MatrixXd V = Eigen::Map<const Eigen::MatrixXd>(res.value.data(), n, n);
  V = 0.5 * (V + V.transpose()).eval();
  V += 0.5 * P;

  std::vector<std::string> labels{"mechanics"};
  for (std::size_t k = 0; k < bank.size(); ++k) labels.push_back("output" + std::to_string(k + 1));

  OutputCovariance out{CovarianceMatrix(V, labels), std::nullopt, res.evaluations, res.achieved * options.rel_tol};
  if (options.commutator) {
    const Eigen::MatrixXd imag = Eigen::Map<const Eigen::MatrixXd>(res.value.data() + entries, n, n);
    out.commutator = 2.0 * imag + filter_symplectic_form(n);
  }
  return out;
}

Eigen::MatrixXd flat_noise_term(const Rates& r, const FilterBank& bank, double rel_tol) {
  const ExtendedModel ext = build_extended_model(r, bank);
  const Eigen::Index n = ext.drift.rows();
  const Eigen::MatrixXd& P = ext.out_projector;
  const Eigen::MatrixXcd flat = (P * ext.diffusion * P).cast<cd>() / (4.0 * r.kappa * r.kappa);
  auto integrand = [&](double omega) -> Eigen::VectorXd {
    const Eigen::MatrixXcd T = ext.transfer(omega);
    const Eigen::MatrixXd K = (T * flat * T.adjoint()).real() / two_pi;
    return Eigen::Map<const Eigen::VectorXd>(K.data(), n * n);
  };

  // The sinc^2 integrand decays only as 1/w^2 while oscillating with period
  // 2pi/tau, so it is integrated on a finite window resolved panel by panel.
  // The neglected tail is below 1/(pi tau W) per diagonal entry.
  const double tau = bank.tau();
  double max_center = 0.0;
  for (const auto& m : bank.modes()) max_center = std::max(max_center, std::abs(m.center));
  const double window = max_center + 4000.0 * std::numbers::pi / tau;
  const double step = 0.5 * std::numbers::pi / tau;
  const auto panels = static_cast<long>(std::ceil(2.0 * window / step));
  std::vector<double> points;
  points.reserve(panels + 1);
  for (long i = 0; i <= panels; ++i) points.push_back(-window + 2.0 * window * i / panels);

  numeric::QuadratureOptions qopt;
  qopt.rel_tol = rel_tol;
  qopt.max_evaluations = 50'000'000;
  auto scale = [n](const Eigen::VectorXd&) { return Eigen::VectorXd::Constant(n * n, 0.5); };
  const auto res = numeric::integrate(integrand, points, n * n, qopt, scale);
  if (!res.converged) throw QuadratureError("flat_noise_term did not converge", res.achieved * rel_tol);
  return Eigen::Map<const Eigen::MatrixXd>(res.value.data(), n, n);
}

std::vector<SpectrumPoint> output_spectrum(const Rates& r, const std::vector<double>& grid, bool markovian) {
  const auto model = dynamics::build_linear_model(r);
  const auto report = dynamics::stability(model);
  if (!report.stable) throw dynamics::UnstableSystem(report);
  const Eigen::Matrix4cd drift = model.drift.cast<cd>();
  Eigen::Matrix4d optical_commutator = Eigen::Matrix4d::Zero();
  optical_commutator(2, 3) = r.kappa;
  optical_commutator(3, 2) = -r.kappa;

  std::vector<SpectrumPoint> out;
  out.reserve(grid.size());
  for (double omega : grid) {
    Eigen::Matrix4cd shifted = drift;
    shifted.diagonal().array() += cd(0.0, omega);
    const Eigen::Matrix4cd M = shifted.inverse();
    const Eigen::RowVector4cd chi = -(M.row(2) + cd(0.0, 1.0) * M.row(3)) / std::sqrt(2.0);
    // Noise correlations at -omega: symmetric part minus the odd Brownian term.
    Eigen::Matrix4cd C = (markovian ? model.diffusion : model.diffusion_at(omega)).cast<cd>();
    C(1, 1) -= r.gamma_m * omega;
    C += cd(0.0, 1.0) * optical_commutator.cast<cd>();
    const cd s = (chi.conjugate() * C * chi.transpose())(0, 0);
    out.push_back({omega, s.real()});
  }
  return out;
}

std::vector<ScanPoint> mech_output_entanglement_scan(const Rates& r, const std::vector<double>& epsilons,
                                                     const std::vector<double>& centers,
                                                     const OutputOptions& options) {
  std::vector<ScanPoint> out;
  for (double eps : epsilons) {
    for (double center : centers) {
      const auto bank = make_filter_bank({center}, eps);
      const auto cm = output_cm(r, bank, options).cm;
      out.push_back({eps, center, gaussian::logarithmic_negativity(cm).log_negativity});
    }
  }
  return out;
}

double two_mode_output_entanglement(const Rates& r, double center1, double center2, double tau,
                                    const OutputOptions& options) {
  const auto bank = make_filter_bank({center1, center2}, tau);
  const auto cm = output_cm(r, bank, options).cm;
  return gaussian::logarithmic_negativity(cm.select_modes({1, 2})).log_negativity;
}

}  // namespace optomech::output
