#include <cmath>
#include <limits>
#include <vector>

#include <gtest/gtest.h>

#include "duelbandit/env.hpp"
#include "duelbandit/sbm.hpp"

namespace duelbandit {
namespace {

TEST(UcbSbm, FreshMachinePlaysArmZero) {
  UcbSbm sbm(3);
  EXPECT_EQ(sbm.advance(), 0u);
}

TEST(UcbSbm, UnplayedArmsAreVisitedInIndexOrder) {
  UcbSbm sbm(4);
  for (ArmIndex x = 0; x < 4; ++x) {
    ASSERT_EQ(sbm.advance(), x);
    sbm.feedback(0.0);
  }
}

TEST(UcbSbm, EqualBonusesLetMeansDecide) {
  const std::vector<std::size_t> counts{1, 1};
  const std::vector<double> sums{1.0, 0.0};
  auto sbm = UcbSbm::from_statistics(3.0, counts, sums);
  EXPECT_EQ(sbm.time(), 3u);
  EXPECT_DOUBLE_EQ(sbm.index(0) - sbm.index(1), 1.0);
  EXPECT_EQ(sbm.advance(), 0u);
}

TEST(UcbSbm, IndexMatchesHandEvaluation) {
  // t = 11, arm 0 played 9 times with mean 0.6, arm 1 once with mean 0.3.
  const std::vector<std::size_t> counts{9, 1};
  const std::vector<double> sums{5.4, 0.3};
  auto sbm = UcbSbm::from_statistics(3.0, counts, sums);
  ASSERT_EQ(sbm.time(), 11u);
  EXPECT_NEAR(sbm.index(0), 1.4161384810323365, 1e-12);
  EXPECT_NEAR(sbm.index(1), 2.74841544309701, 1e-12);
  EXPECT_EQ(sbm.advance(), 1u);
}

TEST(UcbSbm, FeedbackUpdatesMeans) {
  UcbSbm sbm(2);
  ASSERT_EQ(sbm.advance(), 0u);
  sbm.feedback(0.7);
  EXPECT_DOUBLE_EQ(sbm.mean(0), 0.7);
  EXPECT_EQ(sbm.count(0), 1u);
  EXPECT_TRUE(std::isinf(sbm.mean(1)));

  UcbSbm single(1);
  for (double r : {1.0, 1.0, 1.0, 0.0}) {
    single.advance();
    single.feedback(r);
  }
  EXPECT_DOUBLE_EQ(single.mean(0), 0.75);

  UcbSbm pair(1);
  for (double r : {1.0, 0.0}) {
    pair.advance();
    pair.feedback(r);
  }
  EXPECT_DOUBLE_EQ(pair.mean(0), 0.5);
}

TEST(UcbSbm, ResetClearsEverythingAndIsIdempotent) {
  UcbSbm sbm(3);
  Rng rng(RandomSeed{3});
  for (int i = 0; i < 100; ++i) {
    sbm.advance();
    sbm.feedback(rng.uniform01());
  }
  sbm.reset();
  for (ArmIndex x = 0; x < 3; ++x) EXPECT_EQ(sbm.count(x), 0u);
  EXPECT_EQ(sbm.time(), 1u);
  sbm.reset();
  EXPECT_EQ(sbm.time(), 1u);
  EXPECT_EQ(sbm.advance(), 0u);
}

TEST(UcbSbm, ResetDiscardsPendingAdvance) {
  UcbSbm sbm(2);
  sbm.advance();
  sbm.reset();
  EXPECT_FALSE(sbm.pending_arm().has_value());
  EXPECT_NO_THROW(sbm.advance());
}

TEST(UcbSbm, RejectsBadConstruction) {
  EXPECT_THROW(UcbSbm(0), std::invalid_argument);
  EXPECT_THROW(UcbSbm(2, 0.0), std::invalid_argument);
  EXPECT_THROW(UcbSbm(2, std::numeric_limits<double>::infinity()), std::invalid_argument);
  const std::vector<std::size_t> counts{1};
  const std::vector<double> sums{2.0};
  EXPECT_THROW(UcbSbm::from_statistics(3.0, counts, sums), std::out_of_range);
}

TEST(UcbSbm, RejectsRewardsOutsideUnitInterval) {
  UcbSbm sbm(2);
  sbm.advance();
  EXPECT_THROW(sbm.feedback(1.5), std::out_of_range);
  EXPECT_THROW(sbm.feedback(-0.1), std::out_of_range);
}

TEST(UcbSbm, AlternationGuardOverRandomCallSequences) {
  Rng rng(RandomSeed{11});
  for (int trial = 0; trial < 200; ++trial) {
    UcbSbm sbm(4);
    bool pending = false;
    for (int step = 0; step < 50; ++step) {
      const auto op = rng.index(3);
      if (op == 0) {
        if (pending) {
          ASSERT_THROW(sbm.advance(), ContractViolation);
        } else {
          ASSERT_NO_THROW(sbm.advance());
          pending = true;
        }
      } else if (op == 1) {
        if (pending) {
          ASSERT_NO_THROW(sbm.feedback(rng.uniform01()));
          pending = false;
        } else {
          ASSERT_THROW(sbm.feedback(0.5), ContractViolation);
        }
      } else {
        sbm.reset();
        pending = false;
      }
      ASSERT_EQ(sbm.pending_arm().has_value(), pending);
    }
  }
}

TEST(UcbSbm, ConcentratesOnTheBestArm) {
  const BernoulliMab mab({0.8, 0.2, 0.2});
  Rng rng(RandomSeed{42});
  UcbSbm sbm(3);
  for (int t = 0; t < 5000; ++t) {
    const auto x = sbm.advance();
    sbm.feedback(mab.pull(x, rng));
  }
  EXPECT_GT(sbm.count(0), 4500u);
}

TEST(MultiSbmAlpha, FloorAndGrowth) {
  EXPECT_DOUBLE_EQ(multisbm_alpha(6, 32768), 3.0);
  EXPECT_DOUBLE_EQ(multisbm_alpha(6, std::nullopt), 3.0);
  EXPECT_DOUBLE_EQ(multisbm_alpha(6, 2), 3.0);
  EXPECT_DOUBLE_EQ(multisbm_alpha(1, 1000), 3.0);
  // ln(10^6) / ln ln 100 > 3.
  const double expected = std::log(1e6) / std::log(std::log(100.0));
  EXPECT_NEAR(multisbm_alpha(1'000'000, 100), expected, 1e-12);
}

}  // namespace
}  // namespace duelbandit
