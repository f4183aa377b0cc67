#include "strataug/cart.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "strataug/errors.hpp"

namespace strataug {

namespace {

double sse_of(const Eigen::VectorXd& y, const std::vector<int>& idx, int begin, int end,
              double* mean_out) {
  const int n = end - begin;
  double sum = 0.0;
  for (int i = begin; i < end; ++i) sum += y(idx[i]);
  const double mean = sum / n;
  double sse = 0.0;
  for (int i = begin; i < end; ++i) {
    const double d = y(idx[i]) - mean;
    sse += d * d;
  }
  *mean_out = mean;
  return sse;
}

}  // namespace

void CartTree::fit(const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
                   const CartParams& params) {
  if (X.rows() < 1) throw EstimationError("CART needs at least one row");
  nodes_.clear();
  std::vector<int> indices(static_cast<std::size_t>(X.rows()));
  std::iota(indices.begin(), indices.end(), 0);
  double root_mean = 0.0;
  const double root_sse = sse_of(y, indices, 0, static_cast<int>(indices.size()), &root_mean);
  const double min_gain = params.min_improvement * root_sse;
  grow(X, y, indices, 0, static_cast<int>(indices.size()), 0, params, min_gain);
}

int CartTree::grow(const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
                   std::vector<int>& indices, int begin, int end, int depth,
                   const CartParams& params, double min_gain) {
  const int node_id = static_cast<int>(nodes_.size());
  nodes_.emplace_back();

  const int n = end - begin;
  double mean = 0.0;
  const double sse = sse_of(y, indices, begin, end, &mean);
  nodes_[node_id].value = mean;

  if (depth >= params.max_depth || n < 2 * params.min_leaf || sse <= 0.0) {
    return node_id;
  }

  int best_feature = -1;
  int best_pos = -1;  // split between sorted positions pos-1 and pos
  double best_threshold = 0.0;
  double best_gain = 0.0;
  std::vector<int> sorted(indices.begin() + begin, indices.begin() + end);
  std::vector<int> best_sorted;

  for (int f = 0; f < X.cols(); ++f) {
    std::sort(sorted.begin(), sorted.end(), [&](int a, int b) {
      const double xa = X(a, f), xb = X(b, f);
      return xa < xb || (xa == xb && a < b);
    });
    // prefix scan: left side holds sorted[0..pos)
    double left_sum = 0.0, left_sumsq = 0.0;
    double total_sum = 0.0, total_sumsq = 0.0;
    for (int i = 0; i < n; ++i) {
      const double v = y(sorted[i]);
      total_sum += v;
      total_sumsq += v * v;
    }
    for (int pos = 1; pos < n; ++pos) {
      const double v = y(sorted[pos - 1]);
      left_sum += v;
      left_sumsq += v * v;
      if (pos < params.min_leaf || n - pos < params.min_leaf) continue;
      const double x_lo = X(sorted[pos - 1], f);
      const double x_hi = X(sorted[pos], f);
      if (!(x_lo < x_hi)) continue;
      const double right_sum = total_sum - left_sum;
      const double right_sumsq = total_sumsq - left_sumsq;
      const double left_sse = left_sumsq - left_sum * left_sum / pos;
      const double right_sse = right_sumsq - right_sum * right_sum / (n - pos);
      const double gain = sse - left_sse - right_sse;
      if (gain > best_gain + 1e-12) {
        best_gain = gain;
        best_feature = f;
        best_pos = pos;
        best_threshold = 0.5 * (x_lo + x_hi);
        best_sorted = sorted;
      }
    }
  }

  if (best_feature < 0 || best_gain < min_gain) {
    return node_id;
  }

  std::copy(best_sorted.begin(), best_sorted.end(), indices.begin() + begin);
  const int mid = begin + best_pos;
  nodes_[node_id].feature = best_feature;
  nodes_[node_id].threshold = best_threshold;
  nodes_[node_id].left = grow(X, y, indices, begin, mid, depth + 1, params, min_gain);
  nodes_[node_id].right = grow(X, y, indices, mid, end, depth + 1, params, min_gain);
  return node_id;
}

double CartTree::predict(const Eigen::Ref<const Eigen::VectorXd>& x) const {
  int node = 0;
  while (nodes_[node].feature >= 0) {
    node = x(nodes_[node].feature) <= nodes_[node].threshold ? nodes_[node].left
                                                             : nodes_[node].right;
  }
  return nodes_[node].value;
}

Eigen::VectorXd CartTree::predict_matrix(const Eigen::MatrixXd& X) const {
  Eigen::VectorXd out(X.rows());
  for (Eigen::Index i = 0; i < X.rows(); ++i) out(i) = predict(X.row(i).transpose());
  return out;
}

int CartTree::leaf_count() const {
  int leaves = 0;
  for (const Node& node : nodes_) leaves += node.feature < 0 ? 1 : 0;
  return leaves;
}

}  // namespace strataug
