#include "oracle.hpp"

#include <unsupported/Eigen/MatrixFunctions>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <numbers>
#include <string>
#include <thread>
#include <vector>

namespace optomech::oracle {

Philox4x32::Block Philox4x32::operator()(Block c) const noexcept {
  constexpr std::uint64_t m0 = 0xD2511F53u, m1 = 0xCD9E8D57u;
  constexpr std::uint32_t w0 = 0x9E3779B9u, w1 = 0xBB67AE85u;
  std::uint32_t k0 = key_[0], k1 = key_[1];
  for (int round = 0; round < 10; ++round) {
    const std::uint64_t p0 = m0 * c[0];
    const std::uint64_t p1 = m1 * c[2];
    c = {static_cast<std::uint32_t>(p1 >> 32) ^ c[1] ^ k0, static_cast<std::uint32_t>(p1),
         static_cast<std::uint32_t>(p0 >> 32) ^ c[3] ^ k1, static_cast<std::uint32_t>(p0)};
    k0 += w0;
    k1 += w1;
  }
  return c;
}

std::array<double, 4> gaussian_block(const Philox4x32& gen, std::uint64_t stream, std::uint64_t block) {
  const auto r = gen({static_cast<std::uint32_t>(block), static_cast<std::uint32_t>(block >> 32),
                      static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32)});
  auto uniform = [](std::uint32_t x) { return (static_cast<double>(x) + 0.5) * 0x1p-32; };
  std::array<double, 4> z{};
  for (int i = 0; i < 2; ++i) {
    const double radius = std::sqrt(-2.0 * std::log(uniform(r[2 * i])));
    const double angle = 2.0 * std::numbers::pi * uniform(r[2 * i + 1]);
    z[2 * i] = radius * std::cos(angle);
    z[2 * i + 1] = radius * std::sin(angle);
  }
  return z;
}

TrajectoryBlowup::TrajectoryBlowup(std::size_t trajectory, double time, double norm)
    : Error(ErrorCode::Unstable, "trajectory " + std::to_string(trajectory) + " blew up at t=" +
                                     std::to_string(time) + " (|u|=" + std::to_string(norm) + ")") {}

double max_step(const Eigen::MatrixXd& drift, double extra_rate) {
  const double rate = std::max(drift.eigenvalues().cwiseAbs().maxCoeff(), extra_rate);
  return 0.05 / rate;
}

double min_burn_in(const Eigen::MatrixXd& drift) {
  return 10.0 / std::abs(drift.eigenvalues().real().maxCoeff());
}

namespace {

struct Propagator {
  Eigen::MatrixXd transition;
  Eigen::MatrixXd noise_factor;  // L with L L^T = Q
};

Propagator make_propagator(const Eigen::MatrixXd& A, const Eigen::MatrixXd& D, double dt, Scheme scheme) {
  const Eigen::Index n = A.rows();
  Propagator p;
  Eigen::MatrixXd Q;
  if (scheme == Scheme::EulerMaruyama) {
    p.transition = Eigen::MatrixXd::Identity(n, n) + A * dt;
    Q = D * dt;
  } else {
    // Van Loan: exp([[-A, D], [0, A^T]] dt) = [[., F^-1 Q], [0, F^T]].
    Eigen::MatrixXd H = Eigen::MatrixXd::Zero(2 * n, 2 * n);
    H.topLeftCorner(n, n) = -A * dt;
    H.topRightCorner(n, n) = D * dt;
    H.bottomRightCorner(n, n) = A.transpose() * dt;
    const Eigen::MatrixXd E = H.exp();
    p.transition = E.bottomRightCorner(n, n).transpose();
    Q = p.transition * E.topRightCorner(n, n);
  }
  Q = 0.5 * (Q + Q.transpose()).eval();
  const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(Q);
  p.noise_factor = eig.eigenvectors() * eig.eigenvalues().cwiseMax(0.0).cwiseSqrt().asDiagonal();
  return p;
}

struct ChunkSums {
  Eigen::MatrixXd first;   // sum of u u^T
  Eigen::MatrixXd second;  // sum of (u u^T)^2 elementwise
};

}  // namespace

EnsembleEstimate simulate_ensemble(const Eigen::MatrixXd& A, const Eigen::MatrixXd& D, double dt, double t_end,
                                   std::size_t n_traj, std::uint64_t seed, const Options& options) {
  const Eigen::Index n = A.rows();
  if (A.cols() != n || D.rows() != n || D.cols() != n) throw InvalidArgument("drift and diffusion must be square and equal in size");
  if (n_traj < 2) throw InvalidArgument("at least two trajectories are needed");
  if (!(A.eigenvalues().real().maxCoeff() < 0.0)) throw InvalidArgument("oracle requires a stable drift matrix");
  if (!(dt > 0.0) || dt > max_step(A) * (1.0 + 1e-12)) throw InvalidArgument("time step exceeds 0.05/max|eig A|");
  if (!(t_end >= min_burn_in(A) * (1.0 - 1e-12))) throw InvalidArgument("t_end shorter than the 10/|max Re eig| burn-in");

  const auto steps = static_cast<std::size_t>(std::ceil(t_end / dt - 1e-9));
  const Propagator prop = make_propagator(A, D, dt, options.scheme);
  const Philox4x32 gen(seed);
  const double blowup = 1e6 * std::sqrt(1.0 + D.trace() * t_end);

  const std::size_t chunk = std::max<std::size_t>(options.chunk, 1);
  const std::size_t n_chunks = (n_traj + chunk - 1) / chunk;
  std::vector<ChunkSums> sums(n_chunks);
  std::atomic<std::size_t> next{0};
  std::atomic<bool> failed{false};
  std::exception_ptr error;
  std::mutex error_mutex;

  auto worker = [&] {
    Eigen::VectorXd u(n), z(n), product(n);
    for (std::size_t c = next++; c < n_chunks && !failed; c = next++) {
      ChunkSums s{Eigen::MatrixXd::Zero(n, n), Eigen::MatrixXd::Zero(n, n)};
      const std::size_t end = std::min(n_traj, (c + 1) * chunk);
      for (std::size_t traj = c * chunk; traj < end; ++traj) {
        u.setZero();
        std::uint64_t block = 0;
        for (std::size_t step = 0; step < steps; ++step) {
          for (Eigen::Index i = 0; i < n; i += 4) {
            const auto g = gaussian_block(gen, traj, block++);
            for (Eigen::Index k = 0; k < 4 && i + k < n; ++k) z(i + k) = g[k];
          }
          product.noalias() = prop.transition * u;
          product.noalias() += prop.noise_factor * z;
          u.swap(product);
          if ((step & 255) == 255 || step + 1 == steps) {
            const double norm = u.norm();
            if (!std::isfinite(norm) || norm > blowup) {
              std::lock_guard lock(error_mutex);
              if (!failed.exchange(true)) {
                error = std::make_exception_ptr(TrajectoryBlowup(traj, (step + 1) * dt, norm));
              }
              return;
            }
          }
        }
        const Eigen::MatrixXd outer = u * u.transpose();
        s.first += outer;
        s.second += outer.cwiseProduct(outer);
      }
      sums[c] = std::move(s);
    }
  };

  const unsigned threads = std::max(1u, std::min<unsigned>(options.threads, static_cast<unsigned>(n_chunks)));
  if (threads == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  if (error) std::rethrow_exception(error);

  Eigen::MatrixXd first = Eigen::MatrixXd::Zero(n, n), second = Eigen::MatrixXd::Zero(n, n);
  for (const auto& s : sums) {
    first += s.first;
    second += s.second;
  }
  const double count = static_cast<double>(n_traj);
  EnsembleEstimate est;
  est.cm = first / count;
  const Eigen::MatrixXd variance = (second / count - est.cm.cwiseProduct(est.cm)) * (count / (count - 1.0));
  est.standard_error = (variance.cwiseMax(0.0) / count).cwiseSqrt();
  est.trajectories = n_traj;
  est.steps = steps;
  est.dt = dt;
  est.burn_in = steps * dt;
  est.seed = seed;
  est.scheme = options.scheme;
  return est;
}

EnsembleEstimate simulate_ensemble(const dynamics::LinearModel& model, double dt, double t_end,
                                   std::size_t n_traj, std::uint64_t seed, const Options& options) {
  const auto report = dynamics::stability(model);
  if (!report.stable) throw dynamics::UnstableSystem(report);
  const Eigen::MatrixXd A = model.drift;
  const double limit = max_step(A, std::max(1.0, model.rates.kappa));
  if (dt <= 0.0) dt = limit;
  if (dt > limit * (1.0 + 1e-12)) throw InvalidArgument("time step exceeds 0.05/max(|eig A|, kappa, omega_m)");
  if (t_end <= 0.0) t_end = min_burn_in(A);
  return simulate_ensemble(A, Eigen::MatrixXd(model.diffusion), dt, t_end, n_traj, seed, options);
}

}  // namespace optomech::oracle
