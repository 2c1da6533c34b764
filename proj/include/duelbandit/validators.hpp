#pragma once

// Checks of the relaxed stochastic transitivity and triangle-inequality
// conditions on a preference matrix, with Delta(x, y) = eps(x, y) and arms
// ranked by the matrix's implied order.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <iomanip>
#include <limits>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "duelbandit/env.hpp"

namespace duelbandit {

/// Set of admissible gamma values, an interval intersected with [1, inf).
class GammaRange {
 public:
  static constexpr double kSlack = 1e-9;

  /// Adds the constraint gamma * a >= c.
  void require_at_least(double a, double c) {
    if (std::abs(a) <= kSlack) {
      if (c > kSlack) empty_ = true;
    } else if (a > 0.0) {
      lo_ = std::max(lo_, c / a);
    } else {
      hi_ = std::min(hi_, c / a);
    }
  }

  /// Adds the constraint gamma * a <= c.
  void require_at_most(double a, double c) { require_at_least(-a, -c); }

  bool feasible() const noexcept { return !empty_ && lo_ <= hi_ + kSlack; }
  /// Smallest admissible gamma; meaningful only when feasible().
  double min() const noexcept { return lo_; }
  double max() const noexcept { return hi_; }

 private:
  double lo_ = 1.0;
  double hi_ = std::numeric_limits<double>::infinity();
  bool empty_ = false;
};

struct OrderViolation {
  ArmIndex better = 0;
  ArmIndex worse = 0;
  double epsilon = 0.0;
};

struct RelaxedPropertyReport {
  std::vector<ArmIndex> order;
  ArmIndex best = 0;
  /// gamma * D(x*, y) >= max{D(x*, x), D(x, y)} for x* > x > y, x* the best arm.
  GammaRange transitivity;
  /// Same condition over every ordered triple a > b > c.
  GammaRange transitivity_all_triples;
  /// gamma * D(x*, y) <= D(x*, x) + D(x, y) for x* > x > y, as written.
  GammaRange triangle;
  /// D(x*, y) <= gamma * (D(x*, x) + D(x, y)) for x* > x > y.
  GammaRange triangle_mirrored;
  /// gamma * D(x*, y) <= D(x*, x) + D(x, y) for every pair x != y.
  GammaRange extended_triangle;
  /// D(x*, y) <= gamma * (D(x*, x) + D(x, y)) for every pair x != y.
  GammaRange extended_triangle_mirrored;
  /// Pairs ranked x > y whose eps(x, y) is not strictly positive.
  std::vector<OrderViolation> strict_order_violations;
};

inline RelaxedPropertyReport verify_relaxed_properties(const PreferenceMatrixEnvironment& env) {
  RelaxedPropertyReport report;
  report.order = env.implied_order();
  report.best = env.best_arm();
  const auto& ord = report.order;
  const std::size_t k = ord.size();
  const ArmIndex top = report.best;
  auto d = [&](ArmIndex a, ArmIndex b) { return env.epsilon(a, b); };

  for (std::size_t i = 0; i < k; ++i) {
    for (std::size_t j = i + 1; j < k; ++j) {
      if (d(ord[i], ord[j]) <= 0.0) {
        report.strict_order_violations.push_back({ord[i], ord[j], d(ord[i], ord[j])});
      }
      for (std::size_t l = j + 1; l < k; ++l) {
        const ArmIndex a = ord[i], b = ord[j], c = ord[l];
        report.transitivity_all_triples.require_at_least(d(a, c), std::max(d(a, b), d(b, c)));
      }
    }
  }

  // Triples anchored at the best arm: x* > x > y.
  for (std::size_t j = 1; j < k; ++j) {
    for (std::size_t l = j + 1; l < k; ++l) {
      const ArmIndex x = ord[j], y = ord[l];
      report.transitivity.require_at_least(d(top, y), std::max(d(top, x), d(x, y)));
      report.triangle.require_at_most(d(top, y), d(top, x) + d(x, y));
      report.triangle_mirrored.require_at_least(d(top, x) + d(x, y), d(top, y));
    }
  }

  for (ArmIndex x = 0; x < k; ++x) {
    for (ArmIndex y = 0; y < k; ++y) {
      if (x == y) continue;
      report.extended_triangle.require_at_most(d(top, y), d(top, x) + d(x, y));
      report.extended_triangle_mirrored.require_at_least(d(top, x) + d(x, y), d(top, y));
    }
  }
  return report;
}

inline std::string format_report(const RelaxedPropertyReport& report) {
  std::ostringstream out;
  out << std::setprecision(6);
  out << "implied order:";
  for (auto x : report.order) out << ' ' << arm_name(x);
  out << "\nbest arm: " << arm_name(report.best) << '\n';

  auto line = [&](const char* name, const GammaRange& g) {
    out << std::left << std::setw(34) << name;
    if (!g.feasible()) {
      out << "infeasible";
      if (g.min() > g.max()) out << " (needs gamma >= " << g.min() << " and <= " << g.max() << ")";
    } else {
      out << "gamma in [" << g.min() << ", ";
      if (std::isinf(g.max())) {
        out << "inf)";
      } else {
        out << g.max() << "]";
      }
      out << ", minimal gamma = " << g.min();
    }
    out << '\n';
  };
  line("transitivity (anchored at best):", report.transitivity);
  line("transitivity (all triples):", report.transitivity_all_triples);
  line("triangle:", report.triangle);
  line("triangle (mirrored):", report.triangle_mirrored);
  line("extended triangle:", report.extended_triangle);
  line("extended triangle (mirrored):", report.extended_triangle_mirrored);

  out << "strict-order violations: " << report.strict_order_violations.size() << '\n';
  for (const auto& v : report.strict_order_violations) {
    out << "  " << arm_name(v.better) << " > " << arm_name(v.worse)
        << " but eps = " << v.epsilon << '\n';
  }
  return out.str();
}

}  // namespace duelbandit
