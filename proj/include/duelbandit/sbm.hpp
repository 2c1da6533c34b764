#pragma once

// Singleton Bandit Machines: stateful MAB policies behind a
// reset / advance / feedback protocol. advance() and feedback() strictly
// alternate, starting with advance().

#include <algorithm>
#include <cmath>
#include <concepts>
#include <cstddef>
#include <limits>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

#include "duelbandit/core.hpp"

namespace duelbandit {

template <class S>
concept SingletonBanditMachine = requires(S s, const S cs, double reward) {
  s.reset();
  { s.advance() } -> std::convertible_to<ArmIndex>;
  s.feedback(reward);
  { cs.arm_count() } -> std::convertible_to<std::size_t>;
};

/// UCB policy with robustness parameter alpha. The index of arm x at global
/// time t is
///
///   mean_x + sqrt((alpha + 2) * ln(t) / (2 * n_x))
///
/// where n_x is the number of plays of x. Unplayed arms have an infinite
/// index, so every arm is pulled once, in index order, before any
/// comparison happens. Larger alpha widens the confidence radius and
/// lightens the tail of the per-arm pull count.
class UcbSbm {
 public:
  static constexpr double kDefaultAlpha = 3.0;

  explicit UcbSbm(std::size_t arm_count, double alpha = kDefaultAlpha)
      : alpha_(alpha), counts_(arm_count, 0), sums_(arm_count, 0.0) {
    if (arm_count == 0) throw std::invalid_argument("UCB needs at least one arm");
    if (!(alpha > 0.0) || !std::isfinite(alpha)) {
      throw std::invalid_argument("UCB alpha must be a positive finite number");
    }
  }

  /// Rebuilds a machine from per-arm play counts and reward sums, as if
  /// those cycles had been played. Global time becomes sum(counts) + 1.
  static UcbSbm from_statistics(double alpha, std::span<const std::size_t> counts,
                                std::span<const double> reward_sums) {
    if (counts.size() != reward_sums.size()) {
      throw std::invalid_argument("counts and reward sums differ in length");
    }
    UcbSbm sbm(counts.size(), alpha);
    for (std::size_t x = 0; x < counts.size(); ++x) {
      if (reward_sums[x] < 0.0 || reward_sums[x] > static_cast<double>(counts[x])) {
        throw std::out_of_range("reward sum inconsistent with rewards in [0,1]");
      }
      sbm.counts_[x] = counts[x];
      sbm.sums_[x] = reward_sums[x];
      sbm.time_ += counts[x];
    }
    return sbm;
  }

  void reset() {
    std::fill(counts_.begin(), counts_.end(), std::size_t{0});
    std::fill(sums_.begin(), sums_.end(), 0.0);
    time_ = 1;
    pending_.reset();
  }

  ArmIndex advance() {
    if (pending_) throw ContractViolation("UCB advance() called while feedback is pending");
    ArmIndex best = 0;
    double best_index = -std::numeric_limits<double>::infinity();
    for (ArmIndex x = 0; x < counts_.size(); ++x) {
      const double value = index(x);
      if (value > best_index) {
        best = x;
        best_index = value;
        if (std::isinf(value)) break;
      }
    }
    pending_ = best;
    return best;
  }

  void feedback(double reward) {
    if (!pending_) throw ContractViolation("UCB feedback() called without a pending advance()");
    detail::require_unit_interval(reward, "reward");
    const ArmIndex x = *pending_;
    ++counts_[x];
    sums_[x] += reward;
    ++time_;
    pending_.reset();
  }

  /// Current optimistic index of arm x; +inf while x is unplayed.
  double index(ArmIndex x) const {
    const std::size_t n = counts_.at(x);
    if (n == 0) return std::numeric_limits<double>::infinity();
    const double bonus = std::sqrt((alpha_ + 2.0) * std::log(static_cast<double>(time_)) /
                                   (2.0 * static_cast<double>(n)));
    return mean(x) + bonus;
  }

  /// Empirical mean reward of x; +inf while x is unplayed.
  double mean(ArmIndex x) const {
    const std::size_t n = counts_.at(x);
    if (n == 0) return std::numeric_limits<double>::infinity();
    return sums_[x] / static_cast<double>(n);
  }

  std::size_t count(ArmIndex x) const { return counts_.at(x); }
  std::size_t arm_count() const noexcept { return counts_.size(); }
  double alpha() const noexcept { return alpha_; }
  /// Global time t; starts at 1 and grows by one per completed cycle.
  std::size_t time() const noexcept { return time_; }
  std::size_t completed_cycles() const noexcept { return time_ - 1; }
  std::optional<ArmIndex> pending_arm() const noexcept { return pending_; }

 private:
  double alpha_;
  std::vector<std::size_t> counts_;
  std::vector<double> sums_;
  std::size_t time_ = 1;
  std::optional<ArmIndex> pending_;
};

static_assert(SingletonBanditMachine<UcbSbm>);

/// Robustness parameter for MultiSBM's inner machines: max(3, ln K / ln ln T).
/// Falls back to 3 when the horizon is unknown or ln ln T is not positive.
inline double multisbm_alpha(std::size_t arm_count, std::optional<std::size_t> horizon) {
  constexpr double kFloor = 3.0;
  if (!horizon || *horizon < 3 || arm_count < 2) return kFloor;
  const double lnln = std::log(std::log(static_cast<double>(*horizon)));
  return std::max(kFloor, std::log(static_cast<double>(arm_count)) / lnln);
}

}  // namespace duelbandit
