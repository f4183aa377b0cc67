#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>

#include "strataug/rng.hpp"
#include "strataug/theory.hpp"

using namespace strataug;

namespace {

McOptions fast_options(std::uint64_t seed, std::int64_t n_mc = 400'000) {
  McOptions options;
  options.n_mc = n_mc;
  options.seed = seed;
  options.chunks = 20;
  options.abs_tol = 2e-3;
  return options;
}

AugmentationFn custom(std::function<double(const Eigen::Ref<const Eigen::VectorXd>&, int)> f) {
  AugmentationFn b;
  b.tag = AugmentationTag::custom;
  b.eval = std::move(f);
  return b;
}

AugmentationFn oracle_b_opt(const PopulationOracle& oracle) {
  return custom([oracle](const Eigen::Ref<const Eigen::VectorXd>& w, int) {
    return oracle.b_opt(w);
  });
}

}  // namespace

TEST_CASE("sampled potential-outcome means match the oracle truths") {
  for (OutcomeType outcome : {OutcomeType::continuous, OutcomeType::binary}) {
    const PopulationOracle oracle = make_population_oracle(Scenario::D, outcome);
    Rng rng(1234);
    Eigen::Vector3d w;
    double sum1 = 0.0, sum0 = 0.0, sumsq1 = 0.0, sumsq0 = 0.0;
    const int n = 1'000'000;
    for (int i = 0; i < n; ++i) {
      w << rng.normal(), rng.normal(), rng.normal();
      const double normal_noise = rng.normal();
      const double uniform_noise = rng.uniform01();
      const double y1 = oracle.outcome_from_noise(1, w, normal_noise, uniform_noise);
      const double y0 = oracle.outcome_from_noise(0, w, normal_noise, uniform_noise);
      sum1 += y1;
      sumsq1 += y1 * y1;
      sum0 += y0;
      sumsq0 += y0 * y0;
    }
    const double mean1 = sum1 / n, mean0 = sum0 / n;
    const double se1 = std::sqrt((sumsq1 / n - mean1 * mean1) / n);
    const double se0 = std::sqrt((sumsq0 / n - mean0 * mean0) / n);
    CAPTURE(to_string(outcome));
    CHECK(std::abs(mean1 - oracle.mu1) <= 3.0 * se1 + 3.0 * oracle.mu_mc_se + 1e-4);
    CHECK(std::abs(mean0 - oracle.mu0) <= 3.0 * se0 + 3.0 * oracle.mu_mc_se + 1e-4);
  }
}

TEST_CASE("sigma2 matches the closed-form scenario-A values") {
  const PopulationOracle oracle = make_population_oracle(Scenario::A, OutcomeType::continuous);

  const auto [s0, se0] = sigma2(zero_augmentation(), oracle, fast_options(1));
  CHECK(std::abs(s0 - 12.5) <= 3.0 * se0 + 0.01);

  const auto [s_opt, se_opt] = sigma2(oracle_b_opt(oracle), oracle, fast_options(2));
  CHECK(std::abs(s_opt - 5.25) <= 3.0 * se_opt + 0.01);

  // a unit shift adds pi (1 - pi) * 1
  const AugmentationFn shifted = custom(
      [oracle](const Eigen::Ref<const Eigen::VectorXd>& w, int) { return oracle.b_opt(w) + 1.0; });
  const auto [s_shift, se_shift] = sigma2(shifted, oracle, fast_options(2));
  CHECK(std::abs(s_shift - (s_opt + 0.25)) <= 3.0 * (se_shift + se_opt) + 0.01);

  // degenerate oracle: Y(1) = mu1 and Y(0) = mu0 identically
  PopulationOracle degenerate = oracle;
  degenerate.noise_sd = 0.0;
  degenerate.m1_fn = [](const Eigen::Ref<const Eigen::VectorXd>&) { return 0.0; };
  degenerate.m0_fn = [](const Eigen::Ref<const Eigen::VectorXd>&) { return -1.0; };
  const auto [s_d, se_d] = sigma2(zero_augmentation(), degenerate, fast_options(3));
  CHECK(std::abs(s_d) <= 3.0 * se_d + 1e-12);
}

TEST_CASE("projection onto S matches half-normal means") {
  const PopulationOracle oracle = make_population_oracle(Scenario::A, OutcomeType::continuous);

  SUBCASE("independent covariate projects to zero") {
    const AugmentationFn f =
        custom([](const Eigen::Ref<const Eigen::VectorXd>& w, int) { return w(2); });
    const StratumTable table = project_onto_S(f, oracle, fast_options(4));
    for (int k = 0; k < 4; ++k) {
      CHECK(std::abs(table.values(k)) <= 3.0 * table.mc_se(k) + 2e-3);
    }
  }

  SUBCASE("S-measurable functions are reproduced") {
    const AugmentationFn f =
        custom([](const Eigen::Ref<const Eigen::VectorXd>& w, int) { return w(0) > 0 ? 1.0 : 0.0; });
    const StratumTable table = project_onto_S(f, oracle, fast_options(5));
    const double expected[4] = {0.0, 1.0, 0.0, 1.0};
    for (int k = 0; k < 4; ++k) {
      CHECK(std::abs(table.values(k) - expected[k]) <= 3.0 * table.mc_se(k) + 1e-12);
    }
  }

  SUBCASE("W1 projects to the signed half-normal mean") {
    const AugmentationFn f =
        custom([](const Eigen::Ref<const Eigen::VectorXd>& w, int) { return w(0); });
    const StratumTable table = project_onto_S(f, oracle, fast_options(6));
    const double half_normal = std::sqrt(2.0 / std::numbers::pi);
    const double expected[4] = {-half_normal, half_normal, -half_normal, half_normal};
    for (int k = 0; k < 4; ++k) {
      CHECK(std::abs(table.values(k) - expected[k]) <= 3.0 * table.mc_se(k) + 2e-3);
    }
  }

  SUBCASE("projection is idempotent") {
    const AugmentationFn f = custom([](const Eigen::Ref<const Eigen::VectorXd>& w, int) {
      return (w(0) > 0 ? 2.0 : -1.0) + (w(1) > 0 ? 0.5 : 0.0);
    });
    const StratumTable once = project_onto_S(f, oracle, fast_options(7));
    Eigen::VectorXd constants = once.values;
    const AugmentationFn g = custom(
        [constants](const Eigen::Ref<const Eigen::VectorXd>&, int stratum) {
          return constants(stratum - 1);
        });
    const StratumTable twice = project_onto_S(g, oracle, fast_options(8));
    for (int k = 0; k < 4; ++k) {
      CHECK(twice.values(k) == doctest::Approx(constants(k)).epsilon(1e-9));
    }
  }
}

TEST_CASE("proposition 1 holds and gives the scenario-A constants") {
  const PopulationOracle oracle = make_population_oracle(Scenario::A, OutcomeType::continuous);

  SUBCASE("b = b_opt makes both sides zero") {
    const IdentityCheckResult r = check_prop1(oracle_b_opt(oracle), oracle, fast_options(9));
    CHECK(r.pass);
    CHECK(std::abs(r.lhs) <= 3.0 * r.mc_se + 0.01);
    CHECK(r.rhs == doctest::Approx(0.0).epsilon(1e-12));
  }

  SUBCASE("b = 0 gives 7.25") {
    const IdentityCheckResult r = check_prop1(zero_augmentation(), oracle, fast_options(10));
    CHECK(r.pass);
    CHECK(std::abs(r.rhs - 7.25) < 0.05);
  }

  SUBCASE("b = b_opt + W3 gives 0.25") {
    const AugmentationFn b = custom([oracle](const Eigen::Ref<const Eigen::VectorXd>& w, int) {
      return oracle.b_opt(w) + w(2);
    });
    const IdentityCheckResult r = check_prop1(b, oracle, fast_options(11));
    CHECK(r.pass);
    CHECK(std::abs(r.rhs - 0.25) < 0.01);
  }
}

TEST_CASE("proposition 2 equates the stratified variance with the projection") {
  const PopulationOracle oracle = make_population_oracle(Scenario::A, OutcomeType::continuous);

  SUBCASE("b = b_opt collapses to sigma2(b_opt)") {
    const IdentityCheckResult r = check_prop2(oracle_b_opt(oracle), oracle, fast_options(12));
    CHECK(r.pass);
    CHECK(std::abs(r.lhs - 5.25) < 0.1);
  }

  SUBCASE("an S-measurable b behaves like b = 0") {
    const AugmentationFn indicator = custom(
        [](const Eigen::Ref<const Eigen::VectorXd>&, int stratum) {
          return stratum == 1 ? 1.0 : 0.0;
        });
    const IdentityCheckResult with_indicator =
        check_prop2(indicator, oracle, fast_options(13));
    const IdentityCheckResult at_zero = check_eq5(oracle, fast_options(13));
    CHECK(with_indicator.pass);
    CHECK(std::abs(with_indicator.lhs - at_zero.lhs) <
          3.0 * (with_indicator.mc_se + at_zero.mc_se) + 0.05);
  }

  SUBCASE("scenario D strata carry no prognostic information") {
    const PopulationOracle oracle_d = make_population_oracle(Scenario::D, OutcomeType::continuous);
    const IdentityCheckResult r = check_eq5(oracle_d, fast_options(14));
    CHECK(r.pass);
    const auto [s0, se0] = sigma2(zero_augmentation(), oracle_d, fast_options(14));
    CHECK(std::abs(r.lhs - s0) <= 3.0 * (r.mc_se + se0) + 0.02);
  }
}

TEST_CASE("equation 5: the stratified empirical variance is the S-optimal variance") {
  const PopulationOracle oracle = make_population_oracle(Scenario::A, OutcomeType::continuous);
  const IdentityCheckResult r = check_eq5(oracle, fast_options(15));
  CHECK(r.pass);
  // sigma2(0) - sigma2_st(0) = pi (1 - pi) ||proj b_opt||^2 = 10 / pi
  const double expected_gap = 10.0 / std::numbers::pi;
  CHECK(std::abs((12.5 - r.lhs) - expected_gap) < 0.08);
  CHECK(r.lhs < 12.5);
}

TEST_CASE("sigma2_st is invariant to S-measurable shifts of b") {
  const PopulationOracle oracle = make_population_oracle(Scenario::B, OutcomeType::continuous);
  const AugmentationFn b =
      custom([](const Eigen::Ref<const Eigen::VectorXd>& w, int) { return w(0) - w(1); });
  const AugmentationFn b_shifted = custom(
      [](const Eigen::Ref<const Eigen::VectorXd>& w, int stratum) {
        return w(0) - w(1) + (stratum == 2 ? 3.0 : -0.5);
      });
  const IdentityCheckResult r1 = check_prop2(b, oracle, fast_options(16));
  const IdentityCheckResult r2 = check_prop2(b_shifted, oracle, fast_options(16));
  CHECK(r1.pass);
  CHECK(r2.pass);
  CHECK(std::abs(r1.lhs - r2.lhs) < 3.0 * (r1.mc_se + r2.mc_se) + 0.05);
}

TEST_CASE("orthogonality of the optimal residual") {
  const PopulationOracle oracle = make_population_oracle(Scenario::A, OutcomeType::continuous);

  const AugmentationFn d_one =
      custom([](const Eigen::Ref<const Eigen::VectorXd>&, int) { return 1.0; });
  const IdentityCheckResult r1 = check_orthogonality(d_one, oracle, fast_options(17));
  CHECK(r1.pass);

  const AugmentationFn d_w1 =
      custom([](const Eigen::Ref<const Eigen::VectorXd>& w, int) { return w(0); });
  const IdentityCheckResult r2 = check_orthogonality(d_w1, oracle, fast_options(18));
  CHECK(r2.pass);

  // negative control: shifting b_opt by W1 forces covariance -0.25
  const IdentityCheckResult r3 = check_orthogonality(d_w1, oracle, fast_options(19), true);
  CHECK(!r3.pass);
  CHECK(std::abs(r3.lhs - (-0.25)) < 0.02);
}

TEST_CASE("binary oracles expose cached Monte Carlo means") {
  const PopulationOracle oracle = make_population_oracle(Scenario::A, OutcomeType::binary);
  CHECK(oracle.mu_mc_se > 0.0);
  CHECK(oracle.mu_mc_se <= 0.002);
  CHECK(oracle.true_delta() > 0.5);
  CHECK(oracle.true_delta() < 1.0);
  // identity checks hold for the binary outcome as well
  const IdentityCheckResult r = check_prop1(zero_augmentation(), oracle, fast_options(20));
  CHECK(r.pass);
}

TEST_CASE("chunked evaluation is deterministic and worker-independent") {
  const PopulationOracle oracle = make_population_oracle(Scenario::C, OutcomeType::continuous);
  McOptions one = fast_options(21, 100'000);
  one.workers = 1;
  McOptions two = fast_options(21, 100'000);
  two.workers = 2;
  const auto [v1, se1] = sigma2(zero_augmentation(), oracle, one);
  const auto [v2, se2] = sigma2(zero_augmentation(), oracle, two);
  CHECK(v1 == v2);
  CHECK(se1 == se2);
}
