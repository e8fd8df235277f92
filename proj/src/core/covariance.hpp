#pragma once

#include <Eigen/Dense>

#include <string>
#include <vector>

namespace optomech {

// Symmetrized quadrature covariance matrix, (q, p) ordering per mode,
// vacuum variance 1/2.
class CovarianceMatrix {
 public:
  CovarianceMatrix() = default;
  explicit CovarianceMatrix(Eigen::MatrixXd entries, std::vector<std::string> labels = {});

  const Eigen::MatrixXd& matrix() const noexcept { return entries_; }
  Eigen::Index dim() const noexcept { return entries_.rows(); }
  Eigen::Index modes() const noexcept { return entries_.rows() / 2; }
  const std::vector<std::string>& labels() const noexcept { return labels_; }
  double operator()(Eigen::Index i, Eigen::Index j) const { return entries_(i, j); }

  // 2x2 block of one mode.
  Eigen::Matrix2d mode_block(Eigen::Index mode) const;
  // Sub-matrix restricted to the given modes, in the given order.
  CovarianceMatrix select_modes(const std::vector<int>& modes) const;

  double asymmetry() const;
  // Throws UnphysicalState unless symmetric to `symmetry_tol` (relative) and
  // the smallest symplectic eigenvalue is at least 1/2 - `tol`.
  void require_physical(double tol = 1e-9, double symmetry_tol = 1e-12) const;

  static constexpr const char* convention = "symmetrized, (q,p) per mode, vacuum variance 1/2";

 private:
  Eigen::MatrixXd entries_;
  std::vector<std::string> labels_;
};

}  // namespace optomech
