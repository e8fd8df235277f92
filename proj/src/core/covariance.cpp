#include "covariance.hpp"

#include "error.hpp"
#include "gaussian.hpp"

#include <algorithm>
#include <limits>
#include <string>

namespace optomech {

CovarianceMatrix::CovarianceMatrix(Eigen::MatrixXd entries, std::vector<std::string> labels)
    : entries_(std::move(entries)), labels_(std::move(labels)) {
  if (entries_.rows() != entries_.cols() || entries_.rows() % 2 != 0 || entries_.rows() == 0) {
    throw InvalidArgument("covariance matrix must be square with even, nonzero dimension");
  }
  if (!labels_.empty() && static_cast<Eigen::Index>(labels_.size()) != modes()) {
    throw InvalidArgument("one label per mode expected");
  }
}

Eigen::Matrix2d CovarianceMatrix::mode_block(Eigen::Index mode) const {
  return entries_.block<2, 2>(2 * mode, 2 * mode);
}

CovarianceMatrix CovarianceMatrix::select_modes(const std::vector<int>& modes) const {
  const auto n = static_cast<Eigen::Index>(modes.size());
  Eigen::MatrixXd sub(2 * n, 2 * n);
  std::vector<std::string> labels;
  for (Eigen::Index a = 0; a < n; ++a) {
    if (modes[a] < 0 || modes[a] >= this->modes()) throw InvalidArgument("mode index out of range");
    if (!labels_.empty()) labels.push_back(labels_[modes[a]]);
    for (Eigen::Index b = 0; b < n; ++b) {
      sub.block<2, 2>(2 * a, 2 * b) = entries_.block<2, 2>(2 * modes[a], 2 * modes[b]);
    }
  }
  return CovarianceMatrix(std::move(sub), std::move(labels));
}

double CovarianceMatrix::asymmetry() const {
  const double scale = std::max(entries_.cwiseAbs().maxCoeff(), std::numeric_limits<double>::min());
  return (entries_ - entries_.transpose()).cwiseAbs().maxCoeff() / scale;
}

void CovarianceMatrix::require_physical(double tol, double symmetry_tol) const {
  if (asymmetry() > symmetry_tol) {
    throw UnphysicalState("covariance matrix is not symmetric (relative asymmetry " +
                          std::to_string(asymmetry()) + ")");
  }
  const auto nu = gaussian::symplectic_spectrum(entries_);
  if (nu.front() < 0.5 - tol) {
    throw UnphysicalState("smallest symplectic eigenvalue " + std::to_string(nu.front()) + " is below 1/2");
  }
}

}  // namespace optomech
