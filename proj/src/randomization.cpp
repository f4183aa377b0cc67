#include "strataug/randomization.hpp"

#include <cmath>
#include <unordered_map>
#include <vector>

#include "strataug/errors.hpp"
#include "strataug/rng.hpp"

namespace strataug {

Eigen::VectorXi simple_randomize(Eigen::Index n, double pi, std::uint64_t seed) {
  if (!(pi > 0.0 && pi < 1.0)) throw ConfigError("pi must lie in (0, 1)");
  if (n < 1) throw ConfigError("n must be at least 1");
  Rng rng(seed);
  Eigen::VectorXi a(n);
  for (Eigen::Index i = 0; i < n; ++i) a(i) = rng.bernoulli(pi) ? 1 : 0;
  return a;
}

namespace {

// Assignment generator for one stratum: hands out entries of freshly shuffled
// template blocks with exactly n_treated ones each.
struct BlockStream {
  Rng rng;
  std::vector<int> block;
  std::size_t pos;
  int n_treated;

  BlockStream(std::uint64_t seed, int block_size, int n_treated_in)
      : rng(seed), block(static_cast<std::size_t>(block_size), 0),
        pos(block.size()), n_treated(n_treated_in) {}

  int next() {
    if (pos == block.size()) {
      for (std::size_t j = 0; j < block.size(); ++j) {
        block[j] = j < static_cast<std::size_t>(n_treated) ? 1 : 0;
      }
      rng.shuffle(block);
      pos = 0;
    }
    return block[pos++];
  }
};

}  // namespace

Eigen::VectorXi stratified_block_randomize(const Eigen::VectorXi& strata,
                                           const RandomizationPlan& plan) {
  if (!(plan.pi > 0.0 && plan.pi < 1.0)) throw ConfigError("pi must lie in (0, 1)");
  if (plan.block_size < 2) throw ConfigError("block_size must be at least 2");
  const double treated_per_block = plan.pi * plan.block_size;
  const int n_treated = static_cast<int>(std::llround(treated_per_block));
  if (std::abs(treated_per_block - n_treated) > 1e-9 || n_treated < 1 ||
      n_treated >= plan.block_size) {
    throw ConfigError("pi * block_size must be an integer in [1, block_size - 1]");
  }

  std::unordered_map<int, BlockStream> streams;
  Eigen::VectorXi a(strata.size());
  for (Eigen::Index i = 0; i < strata.size(); ++i) {
    const int k = strata(i);
    auto it = streams.find(k);
    if (it == streams.end()) {
      it = streams
               .emplace(k, BlockStream(derive_seed(plan.seed, static_cast<std::uint64_t>(k)),
                                       plan.block_size, n_treated))
               .first;
    }
    a(i) = it->second.next();
  }
  return a;
}

Eigen::VectorXd assignment_imbalance(const TrialDataset& dataset) {
  if (dataset.n() == 0) throw EstimationError("dataset is empty");
  Eigen::VectorXd imbalance = Eigen::VectorXd::Zero(dataset.n_strata);
  for (Eigen::Index i = 0; i < dataset.n(); ++i) {
    const int k = dataset.strata(i) - 1;
    imbalance(k) += dataset.assignment(i) - dataset.pi;
  }
  return imbalance;
}

}  // namespace strataug
