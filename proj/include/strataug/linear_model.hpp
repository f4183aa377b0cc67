#pragma once

#include <Eigen/Core>

#include "strataug/link.hpp"

namespace strataug {

struct CoefficientFit {
  Eigen::VectorXd beta;
  bool converged = true;
  int iterations = 0;
};

// Least squares via column-pivoted QR. Throws SingularDesignError when the
// design is rank deficient (pivot tolerance 1e-10 relative to the largest
// pivot), naming the first dependent column.
Eigen::VectorXd solve_least_squares(const Eigen::MatrixXd& X, const Eigen::VectorXd& y);

CoefficientFit fit_ols(const Eigen::MatrixXd& X, const Eigen::VectorXd& y);

struct IrlsOptions {
  int max_iterations = 100;
  double score_tolerance = 1e-8;
  double beta_bound = 1e3;  // sup-norm divergence threshold
};

// Logistic regression by iteratively reweighted least squares. Solves
// sum_i (y_i - h(x_i' beta)) x_i = 0 with h the inverse link. Throws
// SeparationError when the coefficient norm diverges or the score does not
// vanish within the iteration cap.
CoefficientFit fit_glm_irls(const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
                            const LinkSpec& link, const IrlsOptions& options = {});

}  // namespace strataug
