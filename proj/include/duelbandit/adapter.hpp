#pragma once

// The reverse direction: a dueling solver driving a plain MAB. Each duel is
// played as two consecutive pulls (left, then right); the two observed
// rewards u, v are turned into a synthetic choice with the linear link,
// Pr[right chosen] = (1 + v - u) / 2, and fed back to the solver. The MAB
// regret of the pulls is twice the solver's average-utility regret.

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <utility>
#include <vector>

#include "duelbandit/core.hpp"
#include "duelbandit/env.hpp"
#include "duelbandit/reductions.hpp"
#include "duelbandit/sbm.hpp"

namespace duelbandit {

/// Presents a dueling solver as a singleton bandit machine. The caller owns
/// the random stream, which is used for the solver's proposals and for the
/// synthetic choices.
template <DuelingSolver Solver>
class DuelingSbm {
 public:
  DuelingSbm(Solver solver, std::size_t arm_count, Rng& rng)
      : solver_(std::move(solver)), arm_count_(arm_count), rng_(&rng) {}

  void reset() {
    solver_.reset();
    phase_ = Phase::Idle;
  }

  ArmIndex advance() {
    switch (phase_) {
      case Phase::Idle:
        duel_ = solver_.propose(*rng_);
        phase_ = Phase::LeftPending;
        return duel_.left;
      case Phase::LeftObserved:
        phase_ = Phase::RightPending;
        return duel_.right;
      default:
        throw ContractViolation("dueling adapter advance() called while feedback is pending");
    }
  }

  void feedback(double reward) {
    detail::require_unit_interval(reward, "reward");
    switch (phase_) {
      case Phase::LeftPending:
        left_reward_ = reward;
        phase_ = Phase::LeftObserved;
        return;
      case Phase::RightPending: {
        // Left is chosen with probability (1 + u - v) / 2, drawn the same way
        // a linear-link utility environment draws it.
        const double left_wins = (1.0 + left_reward_ - reward) / 2.0;
        const Choice b = rng_->bernoulli(left_wins) ? Choice::Left : Choice::Right;
        solver_.absorb(b);
        last_choice_ = b;
        phase_ = Phase::Idle;
        return;
      }
      default:
        throw ContractViolation("dueling adapter feedback() called without a pending advance()");
    }
  }

  std::size_t arm_count() const noexcept { return arm_count_; }
  const Solver& solver() const noexcept { return solver_; }
  std::optional<Choice> last_choice() const noexcept { return last_choice_; }

 private:
  enum class Phase { Idle, LeftPending, LeftObserved, RightPending };

  Solver solver_;
  std::size_t arm_count_;
  Rng* rng_;
  Phase phase_ = Phase::Idle;
  Duel duel_;
  double left_reward_ = 0.0;
  std::optional<Choice> last_choice_;
};

struct PullLog {
  std::vector<ArmIndex> arms;
  std::vector<double> rewards;
  /// One synthetic choice per duel.
  std::vector<Choice> choices;

  /// Sum over pulls of mu(x*) - mu(arm).
  double pseudo_regret(const BernoulliMab& mab) const {
    double r = 0.0;
    for (auto a : arms) r += mab.gap(a);
    return r;
  }
};

/// Plays `pulls` MAB rounds (an even number: two per duel) with `solver`.
template <DuelingSolver Solver>
PullLog dueling_to_mab(Solver solver, const BernoulliMab& mab, std::size_t pulls, Rng& rng) {
  if (pulls % 2 != 0) throw std::invalid_argument("MAB horizon must be even: two pulls per duel");
  DuelingSbm<Solver> sbm(std::move(solver), mab.arm_count(), rng);
  PullLog log;
  log.arms.reserve(pulls);
  log.rewards.reserve(pulls);
  log.choices.reserve(pulls / 2);
  for (std::size_t t = 0; t < pulls; ++t) {
    const ArmIndex arm = sbm.advance();
    const double reward = mab.pull(arm, rng);
    sbm.feedback(reward);
    log.arms.push_back(arm);
    log.rewards.push_back(reward);
    if (t % 2 == 1) log.choices.push_back(*sbm.last_choice());
  }
  return log;
}

}  // namespace duelbandit
