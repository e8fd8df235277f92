#pragma once

#include "model.hpp"

#include <Eigen/Dense>

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

namespace optomech::verify {

// max_ij |a_ij - b_ij| / sqrt(|a_ii a_jj|): entries measured against the
// diagonal scale, so structural zeros do not inflate the ratio.
double relative_gap(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b);

struct Check {
  std::string name;
  bool pass = false;
  double achieved = 0.0;
  double tolerance = 0.0;
  std::string detail;
};

struct Options {
  std::uint64_t seed = 1;
  std::size_t trajectories = 20'000;
  unsigned threads = 1;
  double rel_tol = 1e-8;  // quadrature tolerance
};

// Cross-method suite on one operating point: Lyapunov vs spectral integral,
// closed-form sideband CM vs Lyapunov, stochastic ensemble vs Lyapunov, and
// the flat-noise identity of the output construction.
std::vector<Check> run(const Rates& rates, const Options& options);

// One "PASS|FAIL name achieved=... tolerance=... detail" line per check.
std::string format(const std::vector<Check>& checks);

}  // namespace optomech::verify
