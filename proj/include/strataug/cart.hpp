#pragma once

#include <Eigen/Core>
#include <vector>

namespace strataug {

struct CartParams {
  int max_depth = 8;
  int min_leaf = 7;
  // a split must recover at least this fraction of the root SSE
  double min_improvement = 0.01;
};

// Axis-aligned regression tree. Splits maximize the SSE reduction over
// observed midpoints; leaves predict the mean of their training outcomes.
class CartTree {
 public:
  void fit(const Eigen::MatrixXd& X, const Eigen::VectorXd& y, const CartParams& params);

  double predict(const Eigen::Ref<const Eigen::VectorXd>& x) const;
  Eigen::VectorXd predict_matrix(const Eigen::MatrixXd& X) const;

  int node_count() const { return static_cast<int>(nodes_.size()); }
  int leaf_count() const;

 private:
  struct Node {
    int feature = -1;  // -1 marks a leaf
    double threshold = 0.0;
    int left = -1;
    int right = -1;
    double value = 0.0;
  };

  int grow(const Eigen::MatrixXd& X, const Eigen::VectorXd& y, std::vector<int>& indices,
           int begin, int end, int depth, const CartParams& params, double min_gain);

  std::vector<Node> nodes_;
};

}  // namespace strataug
