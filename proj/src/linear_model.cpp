#include "strataug/linear_model.hpp"

#include <Eigen/Cholesky>
#include <Eigen/QR>
#include <cmath>

#include "strataug/errors.hpp"

namespace strataug {

namespace {

Eigen::ColPivHouseholderQR<Eigen::MatrixXd> rank_checked_qr(const Eigen::MatrixXd& X) {
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(X);
  qr.setThreshold(1e-10);
  if (qr.rank() < X.cols()) {
    // columns permuted past the rank index are the dependent ones
    const int offending = static_cast<int>(qr.colsPermutation().indices()(qr.rank()));
    throw SingularDesignError(offending);
  }
  return qr;
}

}  // namespace

Eigen::VectorXd solve_least_squares(const Eigen::MatrixXd& X, const Eigen::VectorXd& y) {
  if (X.rows() < X.cols()) {
    throw EstimationError("least squares needs at least as many rows as columns");
  }
  return rank_checked_qr(X).solve(y);
}

CoefficientFit fit_ols(const Eigen::MatrixXd& X, const Eigen::VectorXd& y) {
  CoefficientFit fit;
  fit.beta = solve_least_squares(X, y);
  fit.converged = true;
  fit.iterations = 1;
  return fit;
}

CoefficientFit fit_glm_irls(const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
                            const LinkSpec& link, const IrlsOptions& options) {
  if (link.kind != LinkKind::logit) {
    throw EstimationError("fit_glm_irls supports the logit link only");
  }
  if (X.rows() < X.cols()) {
    throw EstimationError("IRLS needs at least as many rows as columns");
  }
  rank_checked_qr(X);  // fail fast on collinear designs

  const Eigen::Index p = X.cols();
  CoefficientFit fit;
  fit.beta = Eigen::VectorXd::Zero(p);
  Eigen::VectorXd mu(X.rows()), w(X.rows());
  for (int iter = 1; iter <= options.max_iterations; ++iter) {
    const Eigen::VectorXd eta = X * fit.beta;
    for (Eigen::Index i = 0; i < X.rows(); ++i) {
      const double p_i = link.g_inv(eta(i));
      mu(i) = p_i;
      w(i) = std::max(p_i * (1.0 - p_i), 1e-10);
    }
    const Eigen::VectorXd score = X.transpose() * (y - mu);
    if (score.lpNorm<Eigen::Infinity>() <= options.score_tolerance) {
      // a vanished score with saturated probabilities means the likelihood
      // flattened out along a separating direction, not a finite maximum
      if (eta.lpNorm<Eigen::Infinity>() > 30.0) {
        throw SeparationError("logistic fit saturated: data are (quasi-)separated");
      }
      fit.converged = true;
      fit.iterations = iter;
      return fit;
    }
    const Eigen::MatrixXd info = X.transpose() * w.asDiagonal() * X;
    fit.beta += info.ldlt().solve(score);
    if (!fit.beta.allFinite() || fit.beta.lpNorm<Eigen::Infinity>() > options.beta_bound) {
      throw SeparationError("logistic fit diverged: data are (quasi-)separated");
    }
  }
  throw SeparationError("IRLS did not converge within the iteration cap");
}

}  // namespace strataug
