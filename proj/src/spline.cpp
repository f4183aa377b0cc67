#include "strataug/spline.hpp"

#include <algorithm>
#include <cmath>

namespace strataug {

namespace {

// type-7 quantile (linear interpolation between order statistics)
double quantile(std::vector<double>& sorted, double p) {
  const std::size_t n = sorted.size();
  if (n == 1) return sorted[0];
  const double h = p * (n - 1);
  const std::size_t lo = static_cast<std::size_t>(std::floor(h));
  const std::size_t hi = std::min(lo + 1, n - 1);
  const double frac = h - lo;
  return sorted[lo] * (1.0 - frac) + sorted[hi] * frac;
}

double cube(double v) { return v * v * v; }

}  // namespace

AdditiveBasis AdditiveBasis::from_quartiles(const Eigen::MatrixXd& X) {
  AdditiveBasis basis;
  basis.knots.resize(static_cast<std::size_t>(X.cols()));
  std::vector<double> column(static_cast<std::size_t>(X.rows()));
  for (Eigen::Index j = 0; j < X.cols(); ++j) {
    for (Eigen::Index i = 0; i < X.rows(); ++i) column[static_cast<std::size_t>(i)] = X(i, j);
    std::sort(column.begin(), column.end());
    std::vector<double>& ks = basis.knots[static_cast<std::size_t>(j)];
    for (double p : {0.25, 0.5, 0.75}) {
      const double k = quantile(column, p);
      if (ks.empty() || k > ks.back() + 1e-12) ks.push_back(k);
    }
  }
  return basis;
}

Eigen::Index AdditiveBasis::dimension() const {
  Eigen::Index dim = 0;
  for (const auto& ks : knots) dim += 3 + static_cast<Eigen::Index>(ks.size());
  return dim;
}

Eigen::VectorXd AdditiveBasis::expand_row(const Eigen::Ref<const Eigen::VectorXd>& x) const {
  Eigen::VectorXd row(dimension());
  Eigen::Index c = 0;
  for (std::size_t j = 0; j < knots.size(); ++j) {
    const double v = x(static_cast<Eigen::Index>(j));
    row(c++) = v;
    row(c++) = v * v;
    row(c++) = v * v * v;
    for (double k : knots[j]) row(c++) = v > k ? cube(v - k) : 0.0;
  }
  return row;
}

Eigen::MatrixXd AdditiveBasis::expand(const Eigen::MatrixXd& X) const {
  Eigen::MatrixXd out(X.rows(), dimension());
  for (Eigen::Index i = 0; i < X.rows(); ++i) {
    out.row(i) = expand_row(X.row(i).transpose()).transpose();
  }
  return out;
}

}  // namespace strataug
