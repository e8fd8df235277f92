#include "doctest.h"

#include "dynamics.hpp"
#include "oracle.hpp"

#include <cmath>
#include <limits>

using namespace optomech;

namespace {

double max_z(const oracle::EnsembleEstimate& est, const Eigen::MatrixXd& exact) {
  double worst = 0.0;
  for (Eigen::Index i = 0; i < exact.rows(); ++i)
    for (Eigen::Index j = i; j < exact.cols(); ++j)
      if (est.standard_error(i, j) > 0.0)
        worst = std::max(worst, std::abs(est.cm(i, j) - exact(i, j)) / est.standard_error(i, j));
  return worst;
}

const Rates toy{0.5, 0.2, 0.15, 1.0, 2.0, std::numeric_limits<double>::infinity()};

}  // namespace

TEST_CASE("Philox4x32-10 known-answer vectors") {
  using B = oracle::Philox4x32::Block;
  CHECK(oracle::Philox4x32(0)(B{0, 0, 0, 0}) == B{0x6627e8d5, 0xe169c58d, 0xbc57ac4c, 0x9b00dbd8});
  CHECK(oracle::Philox4x32(0xffffffffffffffffull)(B{0xffffffff, 0xffffffff, 0xffffffff, 0xffffffff}) ==
        B{0x408f276d, 0x41c83b0e, 0xa20bc7c6, 0x6d5451fd});
  CHECK(oracle::Philox4x32(0x299f31d0a4093822ull)(B{0x243f6a88, 0x85a308d3, 0x13198a2e, 0x03707344}) ==
        B{0xd16cfe09, 0x94fdcceb, 0x5001e420, 0x24126ea1});
}

TEST_CASE("normal draws have unit variance") {
  const oracle::Philox4x32 gen(42);
  double sum = 0.0, sq = 0.0;
  const int blocks = 50000;
  for (int b = 0; b < blocks; ++b)
    for (double x : oracle::gaussian_block(gen, 7, b)) {
      sum += x;
      sq += x * x;
    }
  const double n = 4.0 * blocks;
  CHECK(std::abs(sum / n) < 4.0 / std::sqrt(n));
  CHECK(std::abs(sq / n - 1.0) < 4.0 * std::sqrt(2.0 / n));
}

TEST_CASE("isotropic decay reaches I/2") {
  const Eigen::MatrixXd A = -Eigen::MatrixXd::Identity(2, 2), D = Eigen::MatrixXd::Identity(2, 2);
  const auto est = oracle::simulate_ensemble(A, D, 0.05, 10.0, 20000, 3);
  CHECK(max_z(est, 0.5 * Eigen::MatrixXd::Identity(2, 2)) < 4.0);
}

TEST_CASE("uncoupled zero-temperature system relaxes to vacuum") {
  Rates r = toy;
  r.coupling = 0.0;
  r.n_bar = 0.0;
  const auto est = oracle::simulate_ensemble(dynamics::build_linear_model(r), 0.0, 0.0, 8000, 5);
  CHECK(max_z(est, 0.5 * Eigen::MatrixXd::Identity(4, 4)) < 4.5);
}

TEST_CASE("ensemble matches the Lyapunov CM of a coupled system") {
  const auto model = dynamics::build_linear_model(toy);
  const Eigen::MatrixXd exact = dynamics::steady_cm_lyapunov(model).matrix();
  const auto est = oracle::simulate_ensemble(model, 0.0, 0.0, 8000, 11);
  CHECK(max_z(est, exact) < 4.5);
  const auto half = oracle::simulate_ensemble(model, 0.5 * est.dt, 0.0, 8000, 12);
  CHECK(half.steps >= 2 * est.steps - 1);
  CHECK(max_z(half, exact) < 4.5);
}

TEST_CASE("ensemble is independent of the thread count and chunking is by trajectory") {
  const auto model = dynamics::build_linear_model(toy);
  oracle::Options one, four;
  four.threads = 4;
  one.chunk = four.chunk = 100;
  const auto a = oracle::simulate_ensemble(model, 0.0, 0.0, 1000, 9, one);
  const auto b = oracle::simulate_ensemble(model, 0.0, 0.0, 1000, 9, four);
  CHECK((a.cm - b.cm).cwiseAbs().maxCoeff() == 0.0);
  const auto c = oracle::simulate_ensemble(model, 0.0, 0.0, 1000, 10, one);
  CHECK((a.cm - c.cm).cwiseAbs().maxCoeff() > 0.0);
}

TEST_CASE("oracle input validation") {
  const Eigen::MatrixXd A = -Eigen::MatrixXd::Identity(2, 2), D = Eigen::MatrixXd::Identity(2, 2);
  CHECK_THROWS_AS(oracle::simulate_ensemble(A, D, 1.0, 10.0, 100, 1), InvalidArgument);
  CHECK_THROWS_AS(oracle::simulate_ensemble(A, D, 0.05, 1.0, 100, 1), InvalidArgument);
  CHECK_THROWS_AS(oracle::simulate_ensemble(A, D, 0.05, 10.0, 1, 1), InvalidArgument);
  CHECK_THROWS_AS(oracle::simulate_ensemble(-A, D, 0.05, 10.0, 100, 1), InvalidArgument);
  Rates r = toy;
  r.detuning = -1.0;
  r.coupling = 2.0;
  CHECK_THROWS_AS(oracle::simulate_ensemble(dynamics::build_linear_model(r), 0.0, 0.0, 100, 1),
                  dynamics::UnstableSystem);
}

TEST_CASE("Euler-Maruyama on a weakly damped oscillator blows up") {
  Eigen::MatrixXd A(2, 2), D = Eigen::MatrixXd::Zero(2, 2);
  A << 0.0, 1.0, -1.0, -1e-4;
  D(1, 1) = 1e-4;
  oracle::Options em;
  em.scheme = oracle::Scheme::EulerMaruyama;
  const double dt = oracle::max_step(A);
  CHECK_THROWS_AS(oracle::simulate_ensemble(A, D, dt, oracle::min_burn_in(A), 2, 1, em), oracle::TrajectoryBlowup);
}
