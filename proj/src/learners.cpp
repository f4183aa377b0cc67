#include "strataug/learners.hpp"

#include <Eigen/QR>
#include <algorithm>
#include <cmath>
#include <memory>
#include <numeric>

#include "strataug/errors.hpp"
#include "strataug/linear_model.hpp"
#include "strataug/spline.hpp"

namespace strataug {

const char* to_string(LearnerKind kind) {
  switch (kind) {
    case LearnerKind::ols:
      return "ols";
    case LearnerKind::ols_interactions:
      return "ols_interactions";
    case LearnerKind::additive_basis:
      return "additive_basis";
    case LearnerKind::cart:
      return "cart";
    case LearnerKind::super_learner:
      return "super_learner";
  }
  return "ols";
}

Eigen::VectorXd OutcomeModel::predict_matrix(const Eigen::MatrixXd& W) const {
  Eigen::VectorXd out(W.rows());
  for (Eigen::Index i = 0; i < W.rows(); ++i) out(i) = predict_one(W.row(i).transpose());
  return out;
}

namespace {

Eigen::VectorXd plain_features(const Eigen::Ref<const Eigen::VectorXd>& w) {
  Eigen::VectorXd phi(1 + w.size());
  phi(0) = 1.0;
  phi.tail(w.size()) = w;
  return phi;
}

Eigen::VectorXd interaction_features(const Eigen::Ref<const Eigen::VectorXd>& w) {
  const Eigen::Index p = w.size();
  Eigen::VectorXd phi(1 + p + p * (p - 1) / 2);
  phi(0) = 1.0;
  phi.segment(1, p) = w;
  Eigen::Index c = 1 + p;
  for (Eigen::Index i = 0; i < p; ++i) {
    for (Eigen::Index j = i + 1; j < p; ++j) phi(c++) = w(i) * w(j);
  }
  return phi;
}

using FeatureMap = std::function<Eigen::VectorXd(const Eigen::Ref<const Eigen::VectorXd>&)>;

Eigen::MatrixXd build_design(const Eigen::MatrixXd& X, const FeatureMap& features) {
  const Eigen::VectorXd first = features(X.row(0).transpose());
  Eigen::MatrixXd design(X.rows(), first.size());
  design.row(0) = first.transpose();
  for (Eigen::Index i = 1; i < X.rows(); ++i) {
    design.row(i) = features(X.row(i).transpose()).transpose();
  }
  return design;
}

OutcomeModel fit_linear_member(LearnerKind kind, const Eigen::MatrixXd& X,
                               const Eigen::VectorXd& y, OutcomeType outcome,
                               FeatureMap features) {
  const Eigen::MatrixXd design = build_design(X, features);
  OutcomeModel model;
  model.kind = kind;
  if (outcome == OutcomeType::continuous) {
    const Eigen::VectorXd beta = fit_ols(design, y).beta;
    model.predict_one = [features = std::move(features), beta](
                            const Eigen::Ref<const Eigen::VectorXd>& w) {
      return features(w).dot(beta);
    };
  } else {
    const LinkSpec logit = make_link(LinkKind::logit);
    const Eigen::VectorXd beta = fit_glm_irls(design, y, logit).beta;
    model.predict_one = [features = std::move(features), beta, logit](
                            const Eigen::Ref<const Eigen::VectorXd>& w) {
      return logit.g_inv(features(w).dot(beta));
    };
  }
  return model;
}

}  // namespace

OutcomeModel fit_cart(const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
                      const CartParams& params) {
  auto tree = std::make_shared<CartTree>();
  tree->fit(X, y, params);
  OutcomeModel model;
  model.kind = LearnerKind::cart;
  model.predict_one = [tree](const Eigen::Ref<const Eigen::VectorXd>& w) {
    return tree->predict(w);
  };
  return model;
}

OutcomeModel fit_additive_basis(const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
                                OutcomeType outcome) {
  const AdditiveBasis basis = AdditiveBasis::from_quartiles(X);
  if (X.rows() <= basis.dimension() + 1) {
    throw EstimationError("additive basis needs more rows than basis columns");
  }
  FeatureMap features = [basis](const Eigen::Ref<const Eigen::VectorXd>& w) {
    Eigen::VectorXd expanded = basis.expand_row(w);
    Eigen::VectorXd phi(1 + expanded.size());
    phi(0) = 1.0;
    phi.tail(expanded.size()) = expanded;
    return phi;
  };
  return fit_linear_member(LearnerKind::additive_basis, X, y, outcome, std::move(features));
}

namespace {

OutcomeModel fit_member(LearnerKind kind, const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
                        const LearnerOptions& options) {
  switch (kind) {
    case LearnerKind::ols:
      return fit_linear_member(kind, X, y, options.outcome, plain_features);
    case LearnerKind::ols_interactions:
      return fit_linear_member(kind, X, y, options.outcome, interaction_features);
    case LearnerKind::additive_basis:
      return fit_additive_basis(X, y, options.outcome);
    case LearnerKind::cart:
      return fit_cart(X, y, options.cart);
    case LearnerKind::super_learner:
      break;
  }
  throw EstimationError("super_learner cannot be a member of itself");
}

Eigen::MatrixXd take_rows(const Eigen::MatrixXd& X, const std::vector<int>& rows) {
  Eigen::MatrixXd out(static_cast<Eigen::Index>(rows.size()), X.cols());
  for (std::size_t i = 0; i < rows.size(); ++i) out.row(static_cast<Eigen::Index>(i)) = X.row(rows[i]);
  return out;
}

Eigen::VectorXd take_rows(const Eigen::VectorXd& y, const std::vector<int>& rows) {
  Eigen::VectorXd out(static_cast<Eigen::Index>(rows.size()));
  for (std::size_t i = 0; i < rows.size(); ++i) out(static_cast<Eigen::Index>(i)) = y(rows[i]);
  return out;
}

}  // namespace

std::vector<int> assign_folds(Eigen::Index n, int folds, Rng& rng) {
  std::vector<int> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), 0);
  rng.shuffle(order);
  std::vector<int> fold_of(static_cast<std::size_t>(n));
  const Eigen::Index base = n / folds;
  const Eigen::Index extra = n % folds;
  Eigen::Index at = 0;
  for (int f = 0; f < folds; ++f) {
    const Eigen::Index size = base + (f < extra ? 1 : 0);
    for (Eigen::Index i = 0; i < size; ++i) fold_of[static_cast<std::size_t>(order[at++])] = f;
  }
  return fold_of;
}

std::vector<int> assign_folds_by_arm(const Eigen::VectorXi& assignment, int folds, Rng& rng) {
  std::vector<int> fold_of(static_cast<std::size_t>(assignment.size()));
  for (int a : {1, 0}) {
    std::vector<int> rows;
    for (Eigen::Index i = 0; i < assignment.size(); ++i) {
      if (assignment(i) == a) rows.push_back(static_cast<int>(i));
    }
    rng.shuffle(rows);
    const std::size_t base = rows.size() / static_cast<std::size_t>(folds);
    const std::size_t extra = rows.size() % static_cast<std::size_t>(folds);
    std::size_t at = 0;
    for (int f = 0; f < folds; ++f) {
      const std::size_t size = base + (static_cast<std::size_t>(f) < extra ? 1 : 0);
      for (std::size_t i = 0; i < size; ++i) fold_of[static_cast<std::size_t>(rows[at++])] = f;
    }
  }
  return fold_of;
}

Eigen::VectorXd simplex_least_squares(const Eigen::MatrixXd& Z, const Eigen::VectorXd& y) {
  const int L = static_cast<int>(Z.cols());
  if (L < 1) throw EstimationError("simplex least squares needs at least one column");
  Eigen::VectorXd best_w;
  double best_obj = std::numeric_limits<double>::infinity();
  for (unsigned mask = 1; mask < (1u << L); ++mask) {
    std::vector<int> support;
    for (int l = 0; l < L; ++l) {
      if (mask & (1u << l)) support.push_back(l);
    }
    const int t = static_cast<int>(support.size());
    // KKT system of min ||Z_T w - y||^2 subject to sum w = 1
    Eigen::MatrixXd kkt = Eigen::MatrixXd::Zero(t + 1, t + 1);
    Eigen::VectorXd rhs(t + 1);
    for (int r = 0; r < t; ++r) {
      for (int c = 0; c < t; ++c) kkt(r, c) = Z.col(support[r]).dot(Z.col(support[c]));
      kkt(r, t) = 1.0;
      kkt(t, r) = 1.0;
      rhs(r) = Z.col(support[r]).dot(y);
    }
    rhs(t) = 1.0;
    Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod(kkt);
    const Eigen::VectorXd sol = cod.solve(rhs);
    if (!sol.allFinite()) continue;
    Eigen::VectorXd w_support = sol.head(t);
    if (w_support.minCoeff() < -1e-9) continue;
    w_support = w_support.cwiseMax(0.0);
    const double total = w_support.sum();
    if (total <= 0.0) continue;
    w_support /= total;
    Eigen::VectorXd w = Eigen::VectorXd::Zero(L);
    for (int r = 0; r < t; ++r) w(support[r]) = w_support(r);
    const double obj = (Z * w - y).squaredNorm();
    if (obj < best_obj - 1e-12) {
      best_obj = obj;
      best_w = w;
    }
  }
  if (best_w.size() == 0) throw EstimationError("simplex least squares found no feasible point");
  return best_w;
}

OutcomeModel fit_super_learner(const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
                               const LearnerOptions& options, Rng& rng) {
  const Eigen::Index n = X.rows();
  const int folds = options.sl_folds;
  if (folds < 2) throw EstimationError("super learner needs at least 2 folds");
  if (n < 2 * folds) throw EstimationError("super learner needs at least 2 rows per fold");
  if (options.sl_library.empty()) throw EstimationError("super learner library is empty");

  const std::vector<int> fold_of = assign_folds(n, folds, rng);
  std::vector<std::vector<int>> in_fold(static_cast<std::size_t>(folds));
  std::vector<std::vector<int>> out_fold(static_cast<std::size_t>(folds));
  for (Eigen::Index i = 0; i < n; ++i) {
    for (int f = 0; f < folds; ++f) {
      (fold_of[static_cast<std::size_t>(i)] == f ? in_fold : out_fold)[static_cast<std::size_t>(f)]
          .push_back(static_cast<int>(i));
    }
  }

  OutcomeModel ensemble;
  ensemble.kind = LearnerKind::super_learner;

  std::vector<OutcomeModel> members;
  std::vector<LearnerKind> member_kinds;
  std::vector<Eigen::VectorXd> member_oof;  // out-of-fold predictions
  for (LearnerKind kind : options.sl_library) {
    try {
      OutcomeModel full = fit_member(kind, X, y, options);
      Eigen::VectorXd oof(n);
      for (int f = 0; f < folds; ++f) {
        const auto& train = out_fold[static_cast<std::size_t>(f)];
        const auto& test = in_fold[static_cast<std::size_t>(f)];
        if (test.empty()) continue;
        if (train.empty()) throw EstimationError("empty training fold");
        OutcomeModel fold_model =
            fit_member(kind, take_rows(X, train), take_rows(y, train), options);
        for (int row : test) oof(row) = fold_model.predict(X.row(row).transpose());
      }
      members.push_back(std::move(full));
      member_kinds.push_back(kind);
      member_oof.push_back(std::move(oof));
    } catch (const EstimationError& err) {
      ensemble.warnings.push_back(std::string("member ") + to_string(kind) +
                                  " dropped: " + err.what());
    }
  }
  if (members.empty()) {
    throw EstimationError("all super learner members failed to fit");
  }

  const int L = static_cast<int>(members.size());
  Eigen::MatrixXd Z(n, L);
  for (int l = 0; l < L; ++l) Z.col(l) = member_oof[static_cast<std::size_t>(l)];

  const Eigen::VectorXd weights = simplex_least_squares(Z, y);
  ensemble.ensemble_weights = weights;
  ensemble.ensemble_members = member_kinds;
  ensemble.ensemble_cv_risk = (Z * weights - y).squaredNorm() / static_cast<double>(n);
  ensemble.member_cv_risks.resize(L);
  for (int l = 0; l < L; ++l) {
    ensemble.member_cv_risks(l) = (Z.col(l) - y).squaredNorm() / static_cast<double>(n);
  }

  const bool clamp = options.outcome == OutcomeType::binary;
  auto shared_members = std::make_shared<std::vector<OutcomeModel>>(std::move(members));
  ensemble.predict_one = [shared_members, weights, clamp](
                             const Eigen::Ref<const Eigen::VectorXd>& w) {
    double value = 0.0;
    for (int l = 0; l < weights.size(); ++l) {
      value += weights(l) * (*shared_members)[static_cast<std::size_t>(l)].predict(w);
    }
    return clamp ? std::clamp(value, 0.0, 1.0) : value;
  };
  return ensemble;
}

OutcomeModel fit_outcome_model(const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
                               const LearnerOptions& options, Rng& rng) {
  if (options.kind == LearnerKind::super_learner) {
    return fit_super_learner(X, y, options, rng);
  }
  return fit_member(options.kind, X, y, options);
}

std::pair<OutcomeModel, OutcomeModel> fit_arm_models(const TrialDataset& dataset,
                                                     const LearnerOptions& options, Rng& rng) {
  std::vector<int> rows1, rows0;
  for (Eigen::Index i = 0; i < dataset.n(); ++i) {
    (dataset.assignment(i) == 1 ? rows1 : rows0).push_back(static_cast<int>(i));
  }
  if (rows1.empty() || rows0.empty()) throw EstimationError("an arm is empty");
  OutcomeModel m1 = fit_outcome_model(take_rows(dataset.covariates, rows1),
                                      take_rows(dataset.outcome, rows1), options, rng);
  OutcomeModel m0 = fit_outcome_model(take_rows(dataset.covariates, rows0),
                                      take_rows(dataset.outcome, rows0), options, rng);
  return {std::move(m1), std::move(m0)};
}

}  // namespace strataug
