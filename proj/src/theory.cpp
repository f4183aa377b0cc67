#include "strataug/theory.hpp"

#include <cmath>
#include <functional>

#include "strataug/errors.hpp"
#include "strataug/parallel.hpp"
#include "strataug/rng.hpp"

namespace strataug {

double PopulationOracle::b_opt(const Eigen::Ref<const Eigen::VectorXd>& w) const {
  return link.g_prime(mu1) * (m(1, w) - mu1) / pi +
         link.g_prime(mu0) * (m(0, w) - mu0) / (1.0 - pi);
}

double PopulationOracle::outcome_from_noise(int a, const Eigen::Ref<const Eigen::VectorXd>& w,
                                            double normal_noise, double uniform_noise) const {
  const double mean = m(a, w);
  if (outcome == OutcomeType::continuous) return mean + noise_sd * normal_noise;
  return uniform_noise < mean ? 1.0 : 0.0;
}

PopulationOracle make_population_oracle(Scenario scenario, OutcomeType outcome, double pi) {
  PopulationOracle oracle;
  oracle.scenario = scenario;
  oracle.outcome = outcome;
  oracle.link = make_link(outcome == OutcomeType::continuous ? LinkKind::identity
                                                             : LinkKind::logit);
  oracle.pi = pi;
  oracle.strata = sign_quadrant_map();
  const ScenarioTruth truth = scenario_truth(scenario, outcome);
  oracle.mu1 = truth.mu1;
  oracle.mu0 = truth.mu0;
  oracle.mu_mc_se = truth.mc_se;
  const LinkSpec link = oracle.link;
  oracle.m1_fn = [scenario, link](const Eigen::Ref<const Eigen::VectorXd>& w) {
    return link.g_inv(scenario_eta(scenario, w, 1));
  };
  oracle.m0_fn = [scenario, link](const Eigen::Ref<const Eigen::VectorXd>& w) {
    return link.g_inv(scenario_eta(scenario, w, 0));
  };
  return oracle;
}

namespace {

// One Monte-Carlo observation: covariates, stratum, assignment and outcome,
// plus the influence value psi built from the population truths.
struct McDraw {
  Eigen::Vector3d w;
  int stratum = 1;
  int a = 0;
  double y = 0.0;
  double psi = 0.0;
};

McDraw next_draw(const PopulationOracle& oracle, Rng& rng) {
  McDraw d;
  d.w << rng.normal(), rng.normal(), rng.normal();
  d.stratum = oracle.strata.label(d.w);
  d.a = rng.bernoulli(oracle.pi) ? 1 : 0;
  const double normal_noise = oracle.outcome == OutcomeType::continuous ? rng.normal() : 0.0;
  const double uniform_noise = oracle.outcome == OutcomeType::binary ? rng.uniform01() : 0.0;
  d.y = oracle.outcome_from_noise(d.a, d.w, normal_noise, uniform_noise);
  d.psi = d.a == 1 ? oracle.link.g_prime(oracle.mu1) * (d.y - oracle.mu1) / oracle.pi
                   : -oracle.link.g_prime(oracle.mu0) * (d.y - oracle.mu0) / (1.0 - oracle.pi);
  return d;
}

// Per-chunk statistics, computed in parallel over a fixed chunk plan so the
// result is independent of the worker count.
Eigen::MatrixXd run_chunks(const PopulationOracle& oracle, const McOptions& options, int dim,
                           const std::function<Eigen::VectorXd(const PopulationOracle&, Rng&,
                                                               std::int64_t)>& per_chunk) {
  if (options.n_mc < 10'000) throw ConfigError("n_mc must be at least 10000");
  const int chunks = options.chunks;
  Eigen::MatrixXd stats(chunks, dim);
  const std::int64_t base = options.n_mc / chunks;
  const std::int64_t extra = options.n_mc % chunks;
  parallel_for(chunks, options.workers, [&](std::int64_t c) {
    Rng rng(derive_seed(options.seed, static_cast<std::uint64_t>(c)));
    const std::int64_t n_c = base + (c < extra ? 1 : 0);
    stats.row(c) = per_chunk(oracle, rng, n_c).transpose();
  });
  return stats;
}

double column_se(const Eigen::VectorXd& column) {
  const double mean = column.mean();
  const double var = (column.array() - mean).square().sum() /
                     static_cast<double>(column.size() - 1);
  return std::sqrt(var / static_cast<double>(column.size()));
}

IdentityCheckResult result_from_stats(std::string name, const Eigen::MatrixXd& stats,
                                      double abs_tol) {
  IdentityCheckResult result;
  result.name = std::move(name);
  result.lhs = stats.col(0).mean();
  result.rhs = stats.col(1).mean();
  result.mc_se = column_se(stats.col(0) - stats.col(1));
  result.abs_tol = abs_tol;
  result.pass = std::abs(result.lhs - result.rhs) <= 3.0 * result.mc_se + abs_tol;
  return result;
}

double b_eval(const AugmentationFn& b, const McDraw& d) {
  return b.eval ? b.eval(d.w, d.stratum) : 0.0;
}

}  // namespace

std::pair<double, double> sigma2(const AugmentationFn& b, const PopulationOracle& oracle,
                                 const McOptions& options) {
  const Eigen::MatrixXd stats = run_chunks(
      oracle, options, 1,
      [&b](const PopulationOracle& o, Rng& rng, std::int64_t n_c) {
        double sum = 0.0, sumsq = 0.0;
        for (std::int64_t i = 0; i < n_c; ++i) {
          const McDraw d = next_draw(o, rng);
          const double r = d.psi - (d.a - o.pi) * b_eval(b, d);
          sum += r;
          sumsq += r * r;
        }
        const double n = static_cast<double>(n_c);
        const double mean = sum / n;
        Eigen::VectorXd out(1);
        out(0) = sumsq / n - mean * mean;
        return out;
      });
  return {stats.col(0).mean(), column_se(stats.col(0))};
}

StratumTable project_onto_S(const AugmentationFn& f, const PopulationOracle& oracle,
                            const McOptions& options) {
  const int K = oracle.strata.n_strata;
  const Eigen::MatrixXd stats = run_chunks(
      oracle, options, 2 * K,
      [&f, K](const PopulationOracle& o, Rng& rng, std::int64_t n_c) {
        Eigen::VectorXd sums = Eigen::VectorXd::Zero(K);
        Eigen::VectorXd counts = Eigen::VectorXd::Zero(K);
        for (std::int64_t i = 0; i < n_c; ++i) {
          const McDraw d = next_draw(o, rng);
          sums(d.stratum - 1) += b_eval(f, d);
          counts(d.stratum - 1) += 1.0;
        }
        Eigen::VectorXd out(2 * K);
        for (int k = 0; k < K; ++k) {
          out(k) = counts(k) > 0.0 ? sums(k) / counts(k) : 0.0;
          out(K + k) = counts(k);
        }
        return out;
      });
  StratumTable table;
  table.values.resize(K);
  table.mc_se.resize(K);
  for (int k = 0; k < K; ++k) {
    const Eigen::VectorXd means = stats.col(k);
    const Eigen::VectorXd counts = stats.col(K + k);
    table.values(k) = (means.array() * counts.array()).sum() / counts.sum();
    table.mc_se(k) = column_se(means);
  }
  return table;
}

IdentityCheckResult check_prop1(const AugmentationFn& b, const PopulationOracle& oracle,
                                const McOptions& options) {
  const double pq = oracle.pi * (1.0 - oracle.pi);
  const Eigen::MatrixXd stats = run_chunks(
      oracle, options, 2,
      [&b, pq](const PopulationOracle& o, Rng& rng, std::int64_t n_c) {
        double sum_b = 0.0, sumsq_b = 0.0;
        double sum_opt = 0.0, sumsq_opt = 0.0;
        double sum_d2 = 0.0;
        for (std::int64_t i = 0; i < n_c; ++i) {
          const McDraw d = next_draw(o, rng);
          const double b_val = b_eval(b, d);
          const double opt_val = o.b_opt(d.w);
          const double r_b = d.psi - (d.a - o.pi) * b_val;
          const double r_opt = d.psi - (d.a - o.pi) * opt_val;
          sum_b += r_b;
          sumsq_b += r_b * r_b;
          sum_opt += r_opt;
          sumsq_opt += r_opt * r_opt;
          const double diff = b_val - opt_val;
          sum_d2 += diff * diff;
        }
        const double n = static_cast<double>(n_c);
        const double var_b = sumsq_b / n - (sum_b / n) * (sum_b / n);
        const double var_opt = sumsq_opt / n - (sum_opt / n) * (sum_opt / n);
        Eigen::VectorXd out(2);
        out(0) = var_b - var_opt;
        out(1) = pq * sum_d2 / n;
        return out;
      });
  return result_from_stats("prop1", stats, options.abs_tol);
}

namespace {

// Shared chunk body for Proposition 2 and equation (5): both compare the
// stratified variance from equation (1) against the variance at a projected
// augmentation, using common draws for the two sides.
Eigen::VectorXd strat_chunk(const AugmentationFn& b, const PopulationOracle& o, Rng& rng,
                            std::int64_t n_c) {
  const int K = o.strata.n_strata;
  std::vector<McDraw> draws;
  draws.reserve(static_cast<std::size_t>(n_c));
  std::vector<double> b_vals(static_cast<std::size_t>(n_c));
  Eigen::VectorXd gap_sums = Eigen::VectorXd::Zero(K);  // b_opt - b per stratum
  Eigen::VectorXd counts = Eigen::VectorXd::Zero(K);
  for (std::int64_t i = 0; i < n_c; ++i) {
    McDraw d = next_draw(o, rng);
    const double b_val = b_eval(b, d);
    b_vals[static_cast<std::size_t>(i)] = b_val;
    gap_sums(d.stratum - 1) += o.b_opt(d.w) - b_val;
    counts(d.stratum - 1) += 1.0;
    draws.push_back(std::move(d));
  }
  Eigen::VectorXd gap_means = Eigen::VectorXd::Zero(K);
  for (int k = 0; k < K; ++k) {
    if (counts(k) > 0.0) gap_means(k) = gap_sums(k) / counts(k);
  }

  const double pq = o.pi * (1.0 - o.pi);
  const double n = static_cast<double>(n_c);
  double sum_raw = 0.0, sumsq_raw = 0.0;     // psi - (A - pi) b
  double sum_proj = 0.0, sumsq_proj = 0.0;   // psi - (A - pi) (Lambda b)
  double strat_term = 0.0;                   // E[ E{(A-pi)(psi - (A-pi)b) | S}^2 ] / pq
  for (std::int64_t i = 0; i < n_c; ++i) {
    const McDraw& d = draws[static_cast<std::size_t>(i)];
    const double b_val = b_vals[static_cast<std::size_t>(i)];
    const double r_raw = d.psi - (d.a - o.pi) * b_val;
    // Lambda b = b + projection of (b_opt - b) onto functions of S
    const double lambda_val = b_val + gap_means(d.stratum - 1);
    const double r_proj = d.psi - (d.a - o.pi) * lambda_val;
    sum_raw += r_raw;
    sumsq_raw += r_raw * r_raw;
    sum_proj += r_proj;
    sumsq_proj += r_proj * r_proj;
  }
  for (int k = 0; k < K; ++k) {
    strat_term += (counts(k) / n) * pq * gap_means(k) * gap_means(k);
  }
  const double var_raw = sumsq_raw / n - (sum_raw / n) * (sum_raw / n);
  const double var_proj = sumsq_proj / n - (sum_proj / n) * (sum_proj / n);
  Eigen::VectorXd out(2);
  out(0) = var_raw - strat_term;  // sigma2_strat(b) via equation (1)
  out(1) = var_proj;              // sigma2(Lambda b)
  return out;
}

}  // namespace

IdentityCheckResult check_prop2(const AugmentationFn& b, const PopulationOracle& oracle,
                                const McOptions& options) {
  const Eigen::MatrixXd stats = run_chunks(
      oracle, options, 2,
      [&b](const PopulationOracle& o, Rng& rng, std::int64_t n_c) {
        return strat_chunk(b, o, rng, n_c);
      });
  return result_from_stats("prop2", stats, options.abs_tol);
}

IdentityCheckResult check_eq5(const PopulationOracle& oracle, const McOptions& options) {
  const AugmentationFn zero = zero_augmentation();
  const Eigen::MatrixXd stats = run_chunks(
      oracle, options, 2,
      [&zero](const PopulationOracle& o, Rng& rng, std::int64_t n_c) {
        return strat_chunk(zero, o, rng, n_c);
      });
  return result_from_stats("eq5", stats, options.abs_tol);
}

IdentityCheckResult check_orthogonality(const AugmentationFn& d, const PopulationOracle& oracle,
                                        const McOptions& options, bool negative_control) {
  const Eigen::MatrixXd stats = run_chunks(
      oracle, options, 2,
      [&d, negative_control](const PopulationOracle& o, Rng& rng, std::int64_t n_c) {
        double sum = 0.0;
        for (std::int64_t i = 0; i < n_c; ++i) {
          const McDraw draw = next_draw(o, rng);
          double b_val = o.b_opt(draw.w);
          if (negative_control) b_val += draw.w(0);
          const double residual = draw.psi - (draw.a - o.pi) * b_val;
          sum += residual * (draw.a - o.pi) * b_eval(d, draw);
        }
        Eigen::VectorXd out(2);
        out(0) = sum / static_cast<double>(n_c);
        out(1) = 0.0;
        return out;
      });
  return result_from_stats(negative_control ? "orthogonality_negative_control" : "orthogonality",
                           stats, options.abs_tol);
}

std::vector<IdentityCheckResult> run_verification_suite(const McOptions& options,
                                                        bool include_negative_control) {
  std::vector<IdentityCheckResult> results;
  std::uint64_t row = 0;
  auto row_options = [&](std::uint64_t index) {
    McOptions o = options;
    o.seed = derive_seed(options.seed, 0x5713e00ULL + index);
    return o;
  };

  for (Scenario scenario : {Scenario::A, Scenario::B, Scenario::C, Scenario::D}) {
    for (OutcomeType outcome : {OutcomeType::continuous, OutcomeType::binary}) {
      const PopulationOracle oracle = make_population_oracle(scenario, outcome);
      const std::string prefix =
          std::string(to_string(scenario)) + "/" + to_string(outcome) + " ";

      AugmentationFn zero = zero_augmentation();

      AugmentationFn opt_plus_w3;
      opt_plus_w3.tag = AugmentationTag::custom;
      opt_plus_w3.eval = [oracle](const Eigen::Ref<const Eigen::VectorXd>& w, int) {
        return oracle.b_opt(w) + w(2);
      };

      AugmentationFn half_opt_shift;
      half_opt_shift.tag = AugmentationTag::custom;
      half_opt_shift.eval = [oracle](const Eigen::Ref<const Eigen::VectorXd>& w, int) {
        return 0.5 * oracle.b_opt(w) + 1.0;
      };

      AugmentationFn d_one;
      d_one.tag = AugmentationTag::custom;
      d_one.eval = [](const Eigen::Ref<const Eigen::VectorXd>&, int) { return 1.0; };

      AugmentationFn d_w1;
      d_w1.tag = AugmentationTag::custom;
      d_w1.eval = [](const Eigen::Ref<const Eigen::VectorXd>& w, int) { return w(0); };

      IdentityCheckResult r;
      r = check_prop1(zero, oracle, row_options(row++));
      r.name = prefix + "prop1(b=0)";
      results.push_back(r);

      r = check_prop1(opt_plus_w3, oracle, row_options(row++));
      r.name = prefix + "prop1(b=b_opt+W3)";
      results.push_back(r);

      r = check_prop2(half_opt_shift, oracle, row_options(row++));
      r.name = prefix + "prop2(b=b_opt/2+1)";
      results.push_back(r);

      r = check_eq5(oracle, row_options(row++));
      r.name = prefix + "eq5";
      results.push_back(r);

      r = check_orthogonality(d_one, oracle, row_options(row++));
      r.name = prefix + "orthogonality(d=1)";
      results.push_back(r);

      r = check_orthogonality(d_w1, oracle, row_options(row++));
      r.name = prefix + "orthogonality(d=W1)";
      results.push_back(r);
    }
  }

  if (include_negative_control) {
    const PopulationOracle oracle = make_population_oracle(Scenario::A, OutcomeType::continuous);
    AugmentationFn d_w1;
    d_w1.tag = AugmentationTag::custom;
    d_w1.eval = [](const Eigen::Ref<const Eigen::VectorXd>& w, int) { return w(0); };
    IdentityCheckResult r = check_orthogonality(d_w1, oracle, row_options(row++), true);
    r.name = "A/continuous orthogonality negative control";
    results.push_back(r);
  }
  return results;
}

}  // namespace strataug
