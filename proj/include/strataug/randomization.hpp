#pragma once

#include <Eigen/Core>
#include <cstdint>

#include "strataug/dataset.hpp"

namespace strataug {

struct RandomizationPlan {
  Scheme scheme = Scheme::simple;
  double pi = 0.5;
  int block_size = 4;  // stratified only; pi * block_size must be an integer
  std::uint64_t seed = 0;
};

// i.i.d. Bernoulli(pi) assignments from the seeded stream.
Eigen::VectorXi simple_randomize(Eigen::Index n, double pi, std::uint64_t seed);

// Permuted-block assignment within each stratum. Subjects are processed in the
// given order; every completed block of `block_size` consecutive subjects of a
// stratum contains exactly pi * block_size treated, in a uniformly random
// arrangement. A trailing incomplete block is a truncated full block. Each
// stratum draws from its own substream derived from (seed, stratum label).
Eigen::VectorXi stratified_block_randomize(const Eigen::VectorXi& strata,
                                           const RandomizationPlan& plan);

// Per-stratum (n_treated - pi * n_stratum), one entry per label 1..n_strata.
Eigen::VectorXd assignment_imbalance(const TrialDataset& dataset);

}  // namespace strataug
