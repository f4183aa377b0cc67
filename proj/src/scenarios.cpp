#include "strataug/scenarios.hpp"

#include <array>
#include <cmath>
#include <mutex>
#include <numbers>
#include <optional>

#include "strataug/errors.hpp"
#include "strataug/link.hpp"
#include "strataug/rng.hpp"

namespace strataug {

const char* to_string(Scenario s) {
  switch (s) {
    case Scenario::A:
      return "A";
    case Scenario::B:
      return "B";
    case Scenario::C:
      return "C";
    case Scenario::D:
      return "D";
  }
  return "A";
}

Scenario scenario_from_string(const std::string& s) {
  if (s == "A" || s == "a") return Scenario::A;
  if (s == "B" || s == "b") return Scenario::B;
  if (s == "C" || s == "c") return Scenario::C;
  if (s == "D" || s == "d") return Scenario::D;
  throw ConfigError("unknown scenario: " + s);
}

double scenario_eta(Scenario scenario, const Eigen::Ref<const Eigen::VectorXd>& w, int a) {
  const double w1 = w(0), w2 = w(1), w3 = w(2);
  switch (scenario) {
    case Scenario::A:
      return -1.0 + w1 - w2 + w3 + a * (1.0 + w2 - 0.5 * w3);
    case Scenario::B:
      return -1.0 + w1 - w2 + w1 * w3 - w2 * w3 + a * (1.0 + w1 * w2);
    case Scenario::C: {
      const double w2_pos = std::max(w2, 0.0);
      return -1.0 + w1 + w1 * w1 - w2_pos * w2_pos + a * (2.0 + w3 - w3 * w3);
    }
    case Scenario::D:
      return -1.0 + std::sqrt(w1 * w1 + w2 * w2) - std::abs(w3) + a;
  }
  return 0.0;
}

double continuous_mu(Scenario scenario, int a) {
  switch (scenario) {
    case Scenario::A:
    case Scenario::B:
      // treatment terms have mean 1; baseline terms have mean -1
      return a == 1 ? 0.0 : -1.0;
    case Scenario::C:
      // E[W1^2] = 1, E[(W2 v 0)^2] = 1/2, E[W3 - W3^2] = -1
      return a == 1 ? 0.5 : -0.5;
    case Scenario::D: {
      // E sqrt(W1^2 + W2^2) = sqrt(pi/2), E |W3| = sqrt(2/pi)
      const double mu0 = -1.0 + std::sqrt(std::numbers::pi / 2.0) -
                         std::sqrt(2.0 / std::numbers::pi);
      return a == 1 ? mu0 + 1.0 : mu0;
    }
  }
  return 0.0;
}

namespace {

constexpr std::int64_t kBinaryMuDraws = 10'000'000;

ScenarioTruth compute_binary_truth(Scenario scenario) {
  const LinkSpec logit = make_link(LinkKind::logit);
  Rng rng(derive_seed(0xb1a2c0de5u, static_cast<std::uint64_t>(scenario)));
  Eigen::Vector3d w;
  double s1 = 0.0, s0 = 0.0, s11 = 0.0, s00 = 0.0, s10 = 0.0;
  for (std::int64_t i = 0; i < kBinaryMuDraws; ++i) {
    w << rng.normal(), rng.normal(), rng.normal();
    const double m1 = logit.g_inv(scenario_eta(scenario, w, 1));
    const double m0 = logit.g_inv(scenario_eta(scenario, w, 0));
    s1 += m1;
    s0 += m0;
    s11 += m1 * m1;
    s00 += m0 * m0;
    s10 += m1 * m0;
  }
  const double n = static_cast<double>(kBinaryMuDraws);
  ScenarioTruth truth;
  truth.mu1 = s1 / n;
  truth.mu0 = s0 / n;
  truth.delta = logit.g(truth.mu1) - logit.g(truth.mu0);
  // delta method for the log odds ratio on correlated arm means
  const double v11 = s11 / n - truth.mu1 * truth.mu1;
  const double v00 = s00 / n - truth.mu0 * truth.mu0;
  const double v10 = s10 / n - truth.mu1 * truth.mu0;
  const double g1 = logit.g_prime(truth.mu1);
  const double g0 = logit.g_prime(truth.mu0);
  truth.mc_se = std::sqrt((g1 * g1 * v11 + g0 * g0 * v00 - 2.0 * g1 * g0 * v10) / n);
  return truth;
}

}  // namespace

ScenarioTruth scenario_truth(Scenario scenario, OutcomeType outcome) {
  if (outcome == OutcomeType::continuous) {
    ScenarioTruth truth;
    truth.mu1 = continuous_mu(scenario, 1);
    truth.mu0 = continuous_mu(scenario, 0);
    truth.delta = truth.mu1 - truth.mu0;
    truth.mc_se = 0.0;
    return truth;
  }
  static std::array<std::optional<ScenarioTruth>, 4> cache;
  static std::mutex mutex;
  const std::size_t index = static_cast<std::size_t>(scenario);
  std::lock_guard<std::mutex> lock(mutex);
  if (!cache[index]) cache[index] = compute_binary_truth(scenario);
  return *cache[index];
}

}  // namespace strataug
