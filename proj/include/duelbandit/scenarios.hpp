#pragma once

// Built-in experiment scenarios: five expected-utility rows over six arms
// A..F crossed with the three link functions, plus the preference matrix
// setting ("yj") estimated from search-engine interleaving data.

#include <array>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include <Eigen/Dense>

#include "duelbandit/core.hpp"
#include "duelbandit/env.hpp"

namespace duelbandit {

inline constexpr std::size_t kScenarioArms = 6;

struct UtilityRow {
  std::string_view name;
  std::array<double, kScenarioArms> mu;
};

inline constexpr std::array<UtilityRow, 5> kUtilityRows{{
    {"1good", {0.8, 0.2, 0.2, 0.2, 0.2, 0.2}},
    {"2good", {0.8, 0.7, 0.2, 0.2, 0.2, 0.2}},
    {"3good", {0.8, 0.7, 0.7, 0.2, 0.2, 0.2}},
    {"arith", {0.8, 0.7, 0.575, 0.45, 0.325, 0.2}},
    {"geom", {0.8, 0.7, 0.512, 0.374, 0.274, 0.2}},
}};

inline constexpr std::array<LinkKind, 3> kLinkKinds{LinkKind::Linear, LinkKind::Natural,
                                                    LinkKind::Logit};

// Row x, column y holds eps(x, y). The source table lists eps(D, B) as -0.04
// against eps(B, D) = 0.06; the upper-triangle value is kept so the matrix
// is antisymmetric.
// clang-format off
inline constexpr std::array<std::array<double, kScenarioArms>, kScenarioArms> kYjEpsilon{{
    { 0.00,  0.05,  0.05,  0.04,  0.11,  0.11},
    {-0.05,  0.00,  0.05,  0.06,  0.08,  0.10},
    {-0.05, -0.05,  0.00,  0.04,  0.01,  0.06},
    {-0.04, -0.06, -0.04,  0.00,  0.04,  0.00},
    {-0.11, -0.08, -0.01, -0.04,  0.00,  0.01},
    {-0.11, -0.10, -0.06,  0.00, -0.01,  0.00},
}};
// clang-format on

inline Eigen::MatrixXd yj_epsilon_matrix() {
  Eigen::MatrixXd eps(kScenarioArms, kScenarioArms);
  for (std::size_t i = 0; i < kScenarioArms; ++i) {
    for (std::size_t j = 0; j < kScenarioArms; ++j) {
      eps(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = kYjEpsilon[i][j];
    }
  }
  return eps;
}

/// The yj environment with its stated order A > B > C > D > E > F.
inline PreferenceMatrixEnvironment yj_environment() {
  return PreferenceMatrixEnvironment(yj_epsilon_matrix(), std::vector<ArmIndex>{0, 1, 2, 3, 4, 5});
}

using Environment = std::variant<UtilityEnvironment, PreferenceMatrixEnvironment>;

struct Scenario {
  std::string name;
  Environment environment;
};

inline std::string utility_scenario_name(std::string_view row, LinkKind link) {
  return std::string(row) + "-" + std::string(to_string(link));
}

/// All 16 built-in scenarios: "<row>-<link>" for the utility rows, then "yj".
inline std::vector<Scenario> builtin_scenarios(UtilityNoise noise = UtilityNoise::Deterministic) {
  std::vector<Scenario> out;
  out.reserve(kUtilityRows.size() * kLinkKinds.size() + 1);
  for (const auto& row : kUtilityRows) {
    for (auto link : kLinkKinds) {
      out.push_back({utility_scenario_name(row.name, link),
                     UtilityEnvironment(std::vector<double>(row.mu.begin(), row.mu.end()),
                                        LinkFunction(link), noise)});
    }
  }
  out.push_back({"yj", yj_environment()});
  return out;
}

inline std::optional<Scenario> find_scenario(std::string_view name,
                                             UtilityNoise noise = UtilityNoise::Deterministic) {
  for (auto& s : builtin_scenarios(noise)) {
    if (s.name == name) return std::move(s);
  }
  return std::nullopt;
}

}  // namespace duelbandit
