#pragma once

#include "dynamics.hpp"
#include "error.hpp"

#include <Eigen/Dense>

#include <array>
#include <cstddef>
#include <cstdint>

namespace optomech::oracle {

// Philox4x32-10 counter-based generator (Salmon et al., SC'11).
class Philox4x32 {
 public:
  using Block = std::array<std::uint32_t, 4>;
  explicit Philox4x32(std::uint64_t key) noexcept
      : key_{static_cast<std::uint32_t>(key), static_cast<std::uint32_t>(key >> 32)} {}
  Block operator()(Block counter) const noexcept;

 private:
  std::array<std::uint32_t, 2> key_;
};

// Four standard normals for (stream, block); Box-Muller on Philox output.
std::array<double, 4> gaussian_block(const Philox4x32& gen, std::uint64_t stream, std::uint64_t block);

enum class Scheme {
  // u <- exp(A dt) u + sqrt(Q) z with the exact one-step covariance Q.
  ExactGaussian,
  // u <- (I + A dt) u + sqrt(D dt) z.
  EulerMaruyama,
};

struct Options {
  Scheme scheme = Scheme::ExactGaussian;
  unsigned threads = 1;
  std::size_t chunk = 1024;  // trajectories per reduction chunk
};

struct EnsembleEstimate {
  Eigen::MatrixXd cm;
  Eigen::MatrixXd standard_error;
  std::size_t trajectories = 0;
  std::size_t steps = 0;
  double dt = 0.0;
  double burn_in = 0.0;
  std::uint64_t seed = 0;
  Scheme scheme = Scheme::ExactGaussian;
};

class TrajectoryBlowup : public Error {
 public:
  TrajectoryBlowup(std::size_t trajectory, double time, double norm);
};

// Largest admissible step, 0.05 / max(|eig A|, extra_rate).
double max_step(const Eigen::MatrixXd& drift, double extra_rate = 0.0);

// Minimal burn-in, 10 / |max Re eig A|.
double min_burn_in(const Eigen::MatrixXd& drift);

// Integrates du = A u dt + dW, <dW dW^T> = D dt, from u = 0 up to t_end for
// n_traj independent trajectories and returns their second moments at t_end.
// Deterministic in the seed and independent of the thread count. Requires a
// stable drift, dt <= max_step and t_end >= min_burn_in.
EnsembleEstimate simulate_ensemble(const Eigen::MatrixXd& drift, const Eigen::MatrixXd& diffusion, double dt,
                                   double t_end, std::size_t n_traj, std::uint64_t seed,
                                   const Options& options = {});

// Same for the linearized model; dt and t_end default (when <= 0) to
// max_step and min_burn_in.
EnsembleEstimate simulate_ensemble(const dynamics::LinearModel& model, double dt, double t_end,
                                   std::size_t n_traj, std::uint64_t seed, const Options& options = {});

}  // namespace optomech::oracle
