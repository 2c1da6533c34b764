#include <cmath>
#include <vector>

#include <gtest/gtest.h>

#include "duelbandit/env.hpp"
#include "duelbandit/scenarios.hpp"

namespace duelbandit {
namespace {

const std::vector<double> kOneGood{0.8, 0.2, 0.2, 0.2, 0.2, 0.2};
const std::vector<double> kTwoGood{0.8, 0.7, 0.2, 0.2, 0.2, 0.2};
constexpr ArmIndex A = 0, B = 1, C = 2, D = 3, E = 4, F = 5;

double empirical_right_rate(const UtilityEnvironment& env, ArmIndex x, ArmIndex y, int n,
                            std::uint64_t seed) {
  Rng rng(RandomSeed{seed});
  int right = 0;
  for (int i = 0; i < n; ++i) right += env.duel(x, y, rng).choice == Choice::Right;
  return static_cast<double>(right) / n;
}

TEST(UtilityEnvironment, AnalyticChoiceProbabilities) {
  const UtilityEnvironment env(kOneGood, LinkFunction(LinkKind::Linear));
  EXPECT_NEAR(env.right_win_probability(A, B), 0.2, 1e-15);
  for (ArmIndex x = 0; x < 6; ++x) EXPECT_DOUBLE_EQ(env.right_win_probability(x, x), 0.5);

  const UtilityEnvironment degenerate({1.0, 0.0}, LinkFunction(LinkKind::Linear), UtilityNoise::Bernoulli);
  EXPECT_DOUBLE_EQ(degenerate.right_win_probability(0, 1), 0.0);
  Rng rng(RandomSeed{1});
  for (int i = 0; i < 1000; ++i) {
    const auto out = degenerate.duel(0, 1, rng);
    ASSERT_EQ(out.hidden.left, 1.0);
    ASSERT_EQ(out.hidden.right, 0.0);
    ASSERT_EQ(out.choice, Choice::Left);
  }
}

TEST(UtilityEnvironment, DeterministicModeRevealsMeans) {
  const UtilityEnvironment env(kTwoGood, LinkFunction(LinkKind::Natural));
  Rng rng(RandomSeed{2});
  const auto out = env.duel(B, E, rng);
  EXPECT_EQ(out.hidden.left, 0.7);
  EXPECT_EQ(out.hidden.right, 0.2);
}

// Smallest k with Pr[Binomial(n, p) > k] below `level`.
std::size_t binomial_upper_quantile(std::size_t n, double p, double level) {
  double pmf = std::pow(1.0 - p, static_cast<double>(n));
  double cdf = pmf;
  std::size_t k = 0;
  while (1.0 - cdf >= level && k < n) {
    pmf *= static_cast<double>(n - k) / static_cast<double>(k + 1) * p / (1.0 - p);
    cdf += pmf;
    ++k;
  }
  return k;
}

// Many pairs of every built-in utility scenario, both noise modes: empirical
// right-win frequency over 10^5 duels against the analytic probability, each
// at 3 binomial standard errors. Chance alone puts about 0.27% of the checks
// outside that band, so the family fails only when the count of exceedances
// is implausible at the 0.1% level.
TEST(UtilityEnvironment, ChoiceLawCalibration) {
  constexpr int kDuels = 100'000;
  constexpr double kOutsideThreeSigma = 0.0027;
  std::uint64_t seed = 100;
  std::size_t checks = 0, exceedances = 0;
  for (auto noise : {UtilityNoise::Deterministic, UtilityNoise::Bernoulli}) {
    for (const auto& row : kUtilityRows) {
      for (auto link : kLinkKinds) {
        const UtilityEnvironment env({row.mu.begin(), row.mu.end()}, LinkFunction(link), noise);
        for (ArmIndex x = 0; x < 6; x += 2) {
          for (ArmIndex y = 1; y < 6; y += 2) {
            const double p = env.right_win_probability(x, y);
            const double se = std::sqrt(p * (1 - p) / kDuels);
            const double rate = empirical_right_rate(env, x, y, kDuels, ++seed);
            ++checks;
            if (std::abs(rate - p) > 3 * se + 1e-12) {
              ++exceedances;
              // Far outside the band is never chance.
              EXPECT_LE(std::abs(rate - p), 5 * se) << row.name << " " << to_string(link) << " " << x
                                                    << "," << y;
            }
          }
        }
      }
    }
  }
  EXPECT_LE(exceedances, binomial_upper_quantile(checks, kOutsideThreeSigma, 1e-3))
      << exceedances << " of " << checks << " checks outside 3 se";
}

TEST(UtilityEnvironment, SameDuelSameSeedSameOutcome) {
  const UtilityEnvironment env(kTwoGood, LinkFunction(LinkKind::Logit), UtilityNoise::Bernoulli);
  Rng a(RandomSeed{8}), b(RandomSeed{8});
  for (int i = 0; i < 10'000; ++i) {
    const auto x = env.duel(1, 4, a), y = env.duel(1, 4, b);
    ASSERT_EQ(x.choice, y.choice);
    ASSERT_EQ(x.hidden.left, y.hidden.left);
  }
}

TEST(UtilityEnvironment, PermutationRelabelsArms) {
  const UtilityEnvironment env({0.8, 0.7, 0.575, 0.45, 0.325, 0.2}, LinkFunction(LinkKind::Logit));
  const std::vector<std::size_t> perm{5, 4, 3, 2, 1, 0};
  const auto p = env.permuted(perm);
  EXPECT_EQ(p.mu(0), 0.2);
  EXPECT_EQ(p.best_arm(), 5u);
  EXPECT_EQ(p.link(), env.link());
  EXPECT_THROW(env.permuted(std::vector<std::size_t>{0, 0, 1, 2, 3, 4}), std::invalid_argument);
}

TEST(UtilityEnvironment, RejectsInvalidArms) {
  const UtilityEnvironment env(kOneGood, LinkFunction(LinkKind::Linear));
  Rng rng(RandomSeed{3});
  EXPECT_THROW(env.duel(0, 6, rng), std::out_of_range);
  EXPECT_THROW(UtilityEnvironment({0.5, 1.2}, LinkFunction(LinkKind::Linear)), std::out_of_range);
}

TEST(Regret, AverageRegretExamples) {
  const UtilityEnvironment one(kOneGood, LinkFunction(LinkKind::Linear));
  EXPECT_NEAR(regret_av_step(one, {0.2, 0.2}), 0.6, 1e-15);
  EXPECT_EQ(regret_av_step(one, {0.8, 0.8}), 0.0);
  const UtilityEnvironment two(kTwoGood, LinkFunction(LinkKind::Linear));
  EXPECT_NEAR(regret_av_step(two, {0.8, 0.7}), 0.05, 1e-15);
}

TEST(Regret, ChoiceRegretExamples) {
  const UtilityEnvironment one(kOneGood, LinkFunction(LinkKind::Linear));
  EXPECT_EQ(regret_choice_step(one, Choice::Left, {0.8, 0.2}), 0.0);
  EXPECT_NEAR(regret_choice_step(one, Choice::Right, {0.8, 0.2}), 0.6, 1e-15);
  EXPECT_EQ(regret_choice_step(one, Choice::Left, {0.8, 0.8}), 0.0);
  EXPECT_EQ(regret_choice_step(one, Choice::Right, {0.8, 0.8}), 0.0);
}

// Choice regret never exceeds average regret for a fixed pair, for every
// link, checked exactly on a 21 x 21 grid with several best utilities.
TEST(Regret, ChoiceRegretBoundedByAverageRegretOnGrid) {
  for (auto link : kLinkKinds) {
    for (int i = 0; i <= 20; ++i) {
      for (int j = 0; j <= 20; ++j) {
        const double u = i / 20.0, v = j / 20.0;
        for (double best : {std::max(u, v), 1.0}) {
          EXPECT_LE(expected_choice_regret(LinkFunction(link), best, u, v),
                    expected_av_regret(best, u, v) + 1e-15)
              << to_string(link) << " u=" << u << " v=" << v;
        }
      }
    }
  }
}

TEST(PreferenceMatrix, YjTableIntegrity) {
  const auto env = yj_environment();
  const auto& m = env.matrix();
  EXPECT_TRUE((m + m.transpose()).isZero(1e-15));
  const double row_a[] = {0.0, 0.05, 0.05, 0.04, 0.11, 0.11};
  for (int j = 0; j < 6; ++j) EXPECT_EQ(m(0, j), row_a[j]);
  EXPECT_EQ(env.best_arm(), A);
  EXPECT_EQ(env.implied_order(), (std::vector<ArmIndex>{A, B, C, D, E, F}));
}

TEST(PreferenceMatrix, WinProbabilities) {
  const auto env = yj_environment();
  EXPECT_NEAR(env.left_win_probability(A, F), 0.61, 1e-15);
  EXPECT_EQ(env.left_win_probability(C, C), 0.5);
  EXPECT_EQ(env.left_win_probability(D, F), 0.5);

  Rng rng(RandomSeed{4});
  constexpr int kDuels = 100'000;
  for (auto [x, y] : {std::pair{A, F}, std::pair{D, F}, std::pair{B, D}, std::pair{E, C}}) {
    int left = 0;
    for (int i = 0; i < kDuels; ++i) left += env.duel(x, y, rng) == Choice::Left;
    const double p = env.left_win_probability(x, y);
    EXPECT_NEAR(static_cast<double>(left) / kDuels, p, 3 * std::sqrt(p * (1 - p) / kDuels));
  }
}

TEST(PreferenceMatrix, YjRegretExamples) {
  const auto env = yj_environment();
  EXPECT_EQ(regret_yj_step(env, A, A), 0.0);
  EXPECT_NEAR(regret_yj_step(env, E, F), 0.11, 1e-15);
  EXPECT_NEAR(regret_yj_step(env, B, C), 0.05, 1e-15);
}

TEST(PreferenceMatrix, Validation) {
  Eigen::MatrixXd bad(2, 2);
  bad << 0, 0.1, 0.2, 0;
  EXPECT_THROW(PreferenceMatrixEnvironment{bad}, std::invalid_argument);
  bad << 0, 0.6, -0.6, 0;
  EXPECT_THROW(PreferenceMatrixEnvironment{bad}, std::invalid_argument);
  EXPECT_THROW(PreferenceMatrixEnvironment{Eigen::MatrixXd(2, 3)}, std::invalid_argument);
  bad << 0, 0.1, -0.1, 0;
  EXPECT_THROW(PreferenceMatrixEnvironment(bad, std::vector<ArmIndex>{0, 0}), std::invalid_argument);
}

TEST(PreferenceMatrix, InferredOrderAndPermutation) {
  const std::vector<double> mu{0.3, 0.9, 0.5};
  const PreferenceMatrixEnvironment env(linear_preference_matrix(mu));
  EXPECT_EQ(env.implied_order(), (std::vector<ArmIndex>{1, 2, 0}));

  const auto yj = yj_environment();
  const std::vector<std::size_t> perm{3, 0, 5, 1, 4, 2};
  const auto p = yj.permuted(perm);
  // Built-in A now sits at index 1.
  EXPECT_EQ(p.best_arm(), 1u);
  for (std::size_t i = 0; i < 6; ++i) {
    for (std::size_t j = 0; j < 6; ++j) EXPECT_EQ(p.epsilon(i, j), yj.epsilon(perm[i], perm[j]));
  }
  EXPECT_NEAR(regret_yj_step(p, 4, 2), regret_yj_step(yj, E, F), 1e-15);
}

TEST(RegretLedger, CheckpointsAndMeasures) {
  RegretLedger ledger(RegretMeasure::Average, {1, 2, 4});
  for (int i = 0; i < 4; ++i) ledger.record_utility_step(0.5, 0.25);
  ASSERT_EQ(ledger.checkpoints().size(), 3u);
  EXPECT_EQ(ledger.checkpoints()[2].t, 4u);
  EXPECT_EQ(ledger.checkpoints()[2].regret, 2.0);
  EXPECT_EQ(ledger.checkpoints()[2].choice_regret, 1.0);
  EXPECT_THROW(ledger.record_preference_step(0.1), std::logic_error);

  RegretLedger yj(RegretMeasure::Preference, {2});
  yj.record_preference_step(0.1);
  yj.record_preference_step(0.1);
  EXPECT_FALSE(yj.checkpoints()[0].choice_regret.has_value());
  EXPECT_THROW(RegretLedger(RegretMeasure::Average, {2, 2}), std::invalid_argument);
}

TEST(LinearUtilityEnvironment, UtilitiesAndGap) {
  std::vector<Eigen::VectorXd> arms;
  for (int mask = 0; mask < 4; ++mask) {
    Eigen::VectorXd v(2);
    v << (mask & 1), ((mask >> 1) & 1);
    arms.push_back(v);
  }
  const LinearUtilityEnvironment env(Eigen::Vector2d(0.6, 0.3), arms);
  EXPECT_EQ(env.best_arm(), 3u);
  EXPECT_NEAR(env.best_utility(), 0.9, 1e-15);
  EXPECT_NEAR(env.gap(), 0.3, 1e-15);
  EXPECT_THROW(env.utility(Eigen::Vector2d(2.0, 0.0)), std::out_of_range);
}

TEST(BernoulliMab, PullsAreCalibrated) {
  const BernoulliMab mab({0.3, 0.9});
  Rng rng(RandomSeed{5});
  double total = 0;
  for (int i = 0; i < 100'000; ++i) total += mab.pull(0, rng);
  EXPECT_NEAR(total / 1e5, 0.3, 3 * std::sqrt(0.21 / 1e5));
  EXPECT_NEAR(mab.gap(0), 0.6, 1e-15);
}

TEST(Scenarios, RegistryContents) {
  const auto all = builtin_scenarios();
  ASSERT_EQ(all.size(), 16u);
  EXPECT_EQ(all.front().name, "1good-linear");
  EXPECT_EQ(all.back().name, "yj");
  EXPECT_TRUE(find_scenario("geom-logit").has_value());
  EXPECT_FALSE(find_scenario("nosuch").has_value());
}

}  // namespace
}  // namespace duelbandit
