#pragma once

#include <Eigen/Core>
#include <vector>

namespace strataug {

// Additive truncated-power cubic basis: per covariate x it expands to
// x, x^2, x^3 and (x - k)_+^3 for interior knots k placed at the training
// quartiles. Coincident knots are dropped.
struct AdditiveBasis {
  std::vector<std::vector<double>> knots;  // one list per covariate

  static AdditiveBasis from_quartiles(const Eigen::MatrixXd& X);

  Eigen::Index dimension() const;
  // column-wise expansion, no intercept column
  Eigen::MatrixXd expand(const Eigen::MatrixXd& X) const;
  Eigen::VectorXd expand_row(const Eigen::Ref<const Eigen::VectorXd>& x) const;
};

}  // namespace strataug
