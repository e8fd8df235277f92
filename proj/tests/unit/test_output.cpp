#include "doctest.h"
#include "fixtures.hpp"

#include "dynamics.hpp"
#include "gaussian.hpp"
#include "output.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <vector>

using namespace optomech;
using doctest::Approx;
using cd = std::complex<double>;

namespace {

constexpr double pi = std::numbers::pi;

// Gauss-Legendre nodes and weights on [-1, 1] by Newton iteration.
struct GaussLegendre {
  std::vector<double> x, w;
  explicit GaussLegendre(int n) {
    for (int i = 0; i < n; ++i) {
      double z = std::cos(pi * (i + 0.75) / (n + 0.5)), dp = 0.0;
      for (int it = 0; it < 100; ++it) {
        double p0 = 1.0, p1 = z;
        for (int k = 2; k <= n; ++k) {
          const double p2 = ((2 * k - 1) * z * p1 - (k - 1) * p0) / k;
          p0 = p1;
          p1 = p2;
        }
        dp = n * (z * p1 - p0) / (z * z - 1);
        const double dz = p1 / dp;
        z -= dz;
        if (std::abs(dz) < 1e-16) break;
      }
      x.push_back(z);
      w.push_back(2.0 / ((1 - z * z) * dp * dp));
    }
  }
};

cd window(double x, double tau) {
  // int_0^tau e^{i x s} ds / sqrt(tau)
  const double h = 0.5 * x * tau;
  const double sinc = std::abs(h) < 1e-8 ? 1.0 - h * h / 6.0 : std::sin(h) / h;
  return std::sqrt(tau) * std::exp(cd(0.0, h)) * sinc;
}

// Output CM built from the input-noise transfer matrices: every mode is a
// linear functional of (thermal force, cavity input X, cavity input Y); the
// white-noise self term of the filtered input is added in closed form.
Eigen::MatrixXd reference_output_cm(const Rates& r, const std::vector<double>& centers, double tau) {
  const Eigen::Matrix4d A = dynamics::build_linear_model(r).drift;
  const double sk = std::sqrt(2.0 * r.kappa);
  Eigen::Matrix<double, 4, 3> B = Eigen::Matrix<double, 4, 3>::Zero();
  B(1, 0) = 1.0;
  B(2, 1) = sk;
  B(3, 2) = sk;
  const Eigen::Vector3d sw(r.gamma_m * (2 * r.n_bar + 1), 0.5, 0.5);
  Eigen::Matrix<double, 2, 3> pick = Eigen::Matrix<double, 2, 3>::Zero();
  pick(0, 1) = 1.0;
  pick(1, 2) = 1.0;
  const auto N = static_cast<Eigen::Index>(centers.size());
  const Eigen::Index n = 2 * N + 2;

  auto integrand = [&](double w) -> Eigen::MatrixXd {
    const Eigen::Matrix4cd M = A.cast<cd>() + cd(0.0, w) * Eigen::Matrix4cd::Identity();
    const Eigen::Matrix<cd, 4, 3> U = -M.partialPivLu().solve(B.cast<cd>());
    Eigen::MatrixXcd H = Eigen::MatrixXcd::Zero(n, 3), J = Eigen::MatrixXcd::Zero(n, 3);
    H.topRows(2) = U.topRows(2);
    for (Eigen::Index k = 0; k < N; ++k) {
      const double om = centers[k];
      const cd p = window(w + om, tau), m = window(w - om, tau);
      const cd c = 0.5 * (p + m), s = (p - m) / cd(0.0, 2.0);
      Eigen::Matrix2cd R;
      R << c, s, -s, c;
      H.middleRows(2 + 2 * k, 2) = sk * R * U.bottomRows(2);
      J.middleRows(2 + 2 * k, 2) = -R * pick.cast<cd>();
    }
    const Eigen::MatrixXcd S = sw.cast<cd>().asDiagonal();
    return (H * S * H.adjoint() + H * S * J.adjoint() + J * S * H.adjoint()).real() / (2 * pi);
  };

  // Breakpoints: a uniform grid resolving the filter oscillations, refined
  // around every resonance of the drift matrix.
  const double W = 400.0;
  const double h = std::min(0.02, pi / (4 * tau));
  std::vector<double> pts;
  for (double x = -W; x < W; x += h) pts.push_back(x);
  pts.push_back(W);
  const Eigen::ComplexEigenSolver<Eigen::Matrix4d> es(A);
  for (int i = 0; i < 4; ++i) {
    const double c = -es.eigenvalues()(i).imag(), width = -es.eigenvalues()(i).real();
    const double hr = width / 8.0;
    if (hr >= h) continue;
    for (double x = c - 20 * width; x <= c + 20 * width; x += hr) pts.push_back(x);
  }
  std::sort(pts.begin(), pts.end());
  pts.erase(std::unique(pts.begin(), pts.end(), [](double a, double b) { return b - a < 1e-13; }), pts.end());

  const GaussLegendre gl(8);
  Eigen::MatrixXd V = Eigen::MatrixXd::Zero(n, n);
  for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
    const double a = pts[i], b = pts[i + 1], mid = 0.5 * (a + b), half = 0.5 * (b - a);
    for (std::size_t q = 0; q < gl.x.size(); ++q) V += gl.w[q] * half * integrand(mid + half * gl.x[q]);
  }
  // Tails |w| > W through w = W / t.
  const int tail_panels = 400;
  for (int i = 0; i < tail_panels; ++i) {
    const double a = double(i) / tail_panels, b = double(i + 1) / tail_panels, mid = 0.5 * (a + b),
                 half = 0.5 * (b - a);
    for (std::size_t q = 0; q < gl.x.size(); ++q) {
      const double t = mid + half * gl.x[q], jac = W / (t * t);
      V += gl.w[q] * half * jac * (integrand(W / t) + integrand(-W / t));
    }
  }
  for (Eigen::Index k = 2; k < n; ++k) V(k, k) += 0.5;
  return V;
}

double gap(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
  double g = 0.0;
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      g = std::max(g, std::abs(a(i, j) - b(i, j)) / std::sqrt(std::abs(a(i, i) * a(j, j))));
  return g;
}

}  // namespace

TEST_CASE("filter response normalization and overlaps") {
  for (double eps : {1.0, pi, 10 * pi}) {
    const output::FilterMode f{0.7, eps};
    CHECK(std::abs(f.response(0.7)) == Approx(std::sqrt(eps / (2 * pi))).epsilon(1e-14));
    CHECK(std::abs(output::filter_overlap(f, f) - 1.0) < 1e-12);
    const output::FilterMode g{0.7 + 2 * pi / eps, eps};
    CHECK(std::abs(output::filter_overlap(f, g)) < 1e-12);
  }
  const auto bank = output::make_filter_bank({-1.0, 0.0, 1.0}, 2 * pi);
  CHECK(bank.max_overlap() < 1e-10);
  CHECK(bank.max_norm_error() < 1e-10);
  CHECK_THROWS_AS(output::make_filter_bank({-1.0, 0.5}, 2 * pi), output::OrthogonalityError);
  CHECK_THROWS_AS(output::make_filter_bank({}, 2 * pi), InvalidArgument);
}

TEST_CASE("uncoupled cavity emits vacuum and mechanics stays thermal") {
  auto r = fixtures::set_b_rates();
  r.coupling = 0.0;
  const auto out = output::output_cm(r, output::make_filter_bank({-1.0, 1.0}, 10 * pi));
  Eigen::VectorXd diag(6);
  diag << r.n_bar + 0.5, r.n_bar + 0.5, 0.5, 0.5, 0.5, 0.5;
  CHECK(gap(out.cm.matrix(), Eigen::MatrixXd(diag.asDiagonal())) < 1e-6);
}

TEST_CASE("mechanical block of the output CM equals the intracavity one") {
  const auto r = fixtures::set_b_rates();
  const auto intra = dynamics::steady_cm_lyapunov(dynamics::build_linear_model(r));
  for (double eps : {pi, 10 * pi}) {
    const auto out = output::output_cm(r, output::make_filter_bank({-1.0}, eps));
    CHECK(gap(intra.matrix().topLeftCorner(2, 2), out.cm.matrix().topLeftCorner(2, 2)) < 1e-6);
    CHECK(out.cm.labels() == std::vector<std::string>{"mechanics", "output1"});
  }
}

TEST_CASE("output CM agrees with the input-noise transfer reference") {
  const auto r = fixtures::set_b_rates();
  struct Case {
    std::vector<double> centers;
    double eps;
  };
  for (const auto& c : {Case{{-1.0}, 10 * pi}, Case{{-1.0, 1.0}, 10 * pi}, Case{{-1.0, 1.0}, pi}, Case{{0.3}, 2.0}}) {
    const auto prod = output::output_cm(r, output::make_filter_bank(c.centers, c.eps));
    const auto ref = reference_output_cm(r, c.centers, c.eps);
    INFO("eps = " << c.eps << ", centres = " << c.centers.size());
    CHECK(gap(ref, prod.cm.matrix()) < 1e-6);
  }
}

TEST_CASE("commutators of the output modes are canonical") {
  output::OutputOptions oo;
  oo.commutator = true;
  const auto out = output::output_cm(fixtures::set_b_rates(), output::make_filter_bank({-1.0, 1.0}, 10 * pi), oo);
  REQUIRE(out.commutator.has_value());
  CHECK((*out.commutator - gaussian::symplectic_form(3)).cwiseAbs().maxCoeff() < 1e-6);
}

TEST_CASE("output CM is physical and converged") {
  const auto r = fixtures::set_b_rates();
  const auto bank = output::make_filter_bank({-1.0, 1.0}, 10 * pi);
  output::OutputOptions loose, tight;
  loose.rel_tol = 1e-6;
  tight.rel_tol = 1e-10;
  const auto a = output::output_cm(r, bank, loose), b = output::output_cm(r, bank, tight);
  CHECK_NOTHROW(b.cm.require_physical(1e-8, 1e-9));
  CHECK(gap(a.cm.matrix(), b.cm.matrix()) < 1e-5);
  CHECK(b.achieved_rel_error <= 1e-10);
}

TEST_CASE("flat-noise term reduces to half the output projector") {
  const auto r = fixtures::set_b_rates();
  const auto bank = output::make_filter_bank({-1.0, 1.0}, 10 * pi);
  const auto ext = output::build_extended_model(r, bank);
  CHECK((output::flat_noise_term(r, bank) - 0.5 * ext.out_projector).cwiseAbs().maxCoeff() < 1e-4);
}

TEST_CASE("long filters distil the mechanics-Stokes entanglement") {
  const auto r = fixtures::set_b_rates();
  const double intra =
      gaussian::logarithmic_negativity(dynamics::steady_cm_lyapunov(dynamics::build_linear_model(r))).log_negativity;
  const auto scan = output::mech_output_entanglement_scan(r, {10 * pi}, {-1.0, 1.0});
  REQUIRE(scan.size() == 2);
  const auto stokes = std::find_if(scan.begin(), scan.end(), [](const auto& p) { return p.center == -1.0; });
  const auto anti = std::find_if(scan.begin(), scan.end(), [](const auto& p) { return p.center == 1.0; });
  CHECK(stokes->log_negativity > intra);
  CHECK(stokes->log_negativity > anti->log_negativity);
}

TEST_CASE("output spectrum") {
  auto r = fixtures::set_b_rates();
  std::vector<double> grid;
  for (int i = 0; i <= 400; ++i) grid.push_back(-2.0 + 0.01 * i);
  const auto s = output::output_spectrum(r, grid);
  double lo = 1e300, at_m1 = 0.0, at_p1 = 0.0;
  for (const auto& p : s) {
    lo = std::min(lo, p.value);
    if (std::abs(p.omega + 1.0) < 1e-9) at_m1 = p.value;
    if (std::abs(p.omega - 1.0) < 1e-9) at_p1 = p.value;
  }
  CHECK(lo >= -1e-9);
  CHECK(at_m1 > 0.0);
  CHECK(at_p1 > at_m1);

  r.coupling = 0.0;
  for (const auto& p : output::output_spectrum(r, grid)) CHECK(std::abs(p.value) < 1e-12);
}
