#include <cmath>
#include <vector>

#include <gtest/gtest.h>

#include "duelbandit/scenarios.hpp"
#include "duelbandit/validators.hpp"

namespace duelbandit {
namespace {

TEST(GammaRange, Constraints) {
  GammaRange g;
  EXPECT_TRUE(g.feasible());
  EXPECT_EQ(g.min(), 1.0);
  g.require_at_least(0.5, 1.0);  // gamma >= 2
  EXPECT_DOUBLE_EQ(g.min(), 2.0);
  g.require_at_most(1.0, 3.0);  // gamma <= 3
  EXPECT_DOUBLE_EQ(g.max(), 3.0);
  EXPECT_TRUE(g.feasible());
  g.require_at_most(1.0, 1.5);
  EXPECT_FALSE(g.feasible());

  GammaRange zero;
  zero.require_at_least(0.0, 0.01);  // gamma * 0 >= 0.01 is impossible
  EXPECT_FALSE(zero.feasible());
  GammaRange trivially;
  trivially.require_at_least(0.0, -0.01);
  EXPECT_TRUE(trivially.feasible());
}

TEST(RelaxedProperties, LinearUtilityMatricesAreTransitiveWithGammaOne) {
  for (const auto& row : kUtilityRows) {
    const std::vector<double> mu(row.mu.begin(), row.mu.end());
    const PreferenceMatrixEnvironment env(linear_preference_matrix(mu));
    const auto report = verify_relaxed_properties(env);
    EXPECT_EQ(report.best, 0u) << row.name;
    EXPECT_TRUE(report.transitivity.feasible()) << row.name;
    EXPECT_DOUBLE_EQ(report.transitivity.min(), 1.0) << row.name;
    EXPECT_TRUE(report.triangle.feasible()) << row.name;
  }
}

TEST(RelaxedProperties, StrictlyOrderedUtilitiesHaveNoViolations) {
  const std::vector<double> mu{0.8, 0.7, 0.575, 0.45, 0.325, 0.2};
  const auto report = verify_relaxed_properties(PreferenceMatrixEnvironment(linear_preference_matrix(mu)));
  EXPECT_TRUE(report.strict_order_violations.empty());
  EXPECT_TRUE(report.transitivity_all_triples.feasible());
  EXPECT_DOUBLE_EQ(report.transitivity_all_triples.min(), 1.0);
  EXPECT_TRUE(report.extended_triangle.feasible());
}

// Expected values from an independent brute-force scan over gamma in
// [1, 21] with step 1e-4 over the encoded table.
TEST(RelaxedProperties, YjTable) {
  const auto report = verify_relaxed_properties(yj_environment());
  ASSERT_EQ(report.strict_order_violations.size(), 1u);
  EXPECT_EQ(report.strict_order_violations[0].better, 3u);
  EXPECT_EQ(report.strict_order_violations[0].worse, 5u);
  EXPECT_EQ(report.strict_order_violations[0].epsilon, 0.0);

  ASSERT_TRUE(report.transitivity.feasible());
  EXPECT_NEAR(report.transitivity.min(), 1.5, 1e-12);
  EXPECT_TRUE(std::isinf(report.transitivity.max()));
  EXPECT_FALSE(report.transitivity_all_triples.feasible());
  EXPECT_FALSE(report.triangle.feasible());
  ASSERT_TRUE(report.triangle_mirrored.feasible());
  EXPECT_NEAR(report.triangle_mirrored.min(), 2.75, 1e-12);
  EXPECT_FALSE(report.extended_triangle.feasible());
  EXPECT_FALSE(report.extended_triangle_mirrored.feasible());
}

TEST(RelaxedProperties, ReportText) {
  const auto text = format_report(verify_relaxed_properties(yj_environment()));
  EXPECT_NE(text.find("implied order: A B C D E F"), std::string::npos);
  EXPECT_NE(text.find("minimal gamma = 1.5"), std::string::npos);
  EXPECT_NE(text.find("D > F but eps = 0"), std::string::npos);
}

}  // namespace
}  // namespace duelbandit
