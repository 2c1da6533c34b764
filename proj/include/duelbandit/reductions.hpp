#pragma once

// Reductions from utility-based dueling bandits to singleton bandit machines.
// Every solver follows the same two-step protocol per duel: propose() a pair
// (left, right), then absorb() the observed choice. The solvers only ever see
// the choice bit; latent utilities never reach them.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "duelbandit/core.hpp"
#include "duelbandit/linear_sbm.hpp"
#include "duelbandit/sbm.hpp"

namespace duelbandit {

struct Duel {
  ArmIndex left = 0;
  ArmIndex right = 0;
  friend constexpr bool operator==(const Duel&, const Duel&) = default;
};

template <class R>
concept DuelingSolver = requires(R r, Rng& rng, Choice b) {
  { r.propose(rng) } -> std::same_as<Duel>;
  r.absorb(b);
  r.reset();
};

namespace detail {

constexpr double right_won(Choice b) noexcept { return b == Choice::Right ? 1.0 : 0.0; }
constexpr double left_won(Choice b) noexcept { return b == Choice::Left ? 1.0 : 0.0; }

/// Epoch bookkeeping shared by the Doubler variants: epoch i (starting at 1)
/// lasts exactly 2^i duels, so boundaries fall after 2, 6, 14, 30, ... duels.
class EpochClock {
 public:
  void reset() {
    epoch_ = 1;
    remaining_ = length(epoch_);
  }

  /// Consumes one duel; returns true when that duel closed the epoch.
  bool tick() {
    if (--remaining_ > 0) return false;
    ++epoch_;
    remaining_ = length(epoch_);
    return true;
  }

  std::size_t epoch() const noexcept { return epoch_; }
  std::uint64_t remaining() const noexcept { return remaining_; }
  std::uint64_t elapsed() const noexcept { return length(epoch_) - remaining_; }

  static constexpr std::uint64_t length(std::size_t epoch) noexcept {
    return std::uint64_t{1} << epoch;
  }

 private:
  std::size_t epoch_ = 1;
  std::uint64_t remaining_ = 2;
};

}  // namespace detail

// ---------------------------------------------------------------------------
// Doubler

/// Epoch-based reduction. Within epoch i the left arm is drawn uniformly from
/// the multiset of right arms played during epoch i-1, while the right arm
/// comes from an SBM that is reset at the start of every epoch and rewarded
/// with 1 whenever the right arm wins.
template <SingletonBanditMachine Sbm>
class Doubler {
 public:
  explicit Doubler(Sbm sbm, ArmIndex initial_left = 0)
      : Doubler(std::move(sbm), std::vector<ArmIndex>{initial_left}) {}

  /// Starts from an arbitrary nonempty left multiset instead of a single arm.
  Doubler(Sbm sbm, std::vector<ArmIndex> initial_left_multiset)
      : sbm_(std::move(sbm)), initial_pool_(std::move(initial_left_multiset)) {
    if (initial_pool_.empty()) throw std::invalid_argument("initial left multiset is empty");
    for (auto x : initial_pool_) {
      if (x >= sbm_.arm_count()) throw std::out_of_range("initial left arm out of range");
    }
    reset();
  }

  void reset() {
    sbm_.reset();
    clock_.reset();
    left_pool_ = initial_pool_;
    next_pool_.clear();
    pending_.reset();
  }

  Duel propose(Rng& rng) {
    if (pending_) throw ContractViolation("Doubler propose() called while a choice is pending");
    const ArmIndex left = left_pool_[rng.index(left_pool_.size())];
    const ArmIndex right = sbm_.advance();
    pending_ = Duel{left, right};
    return *pending_;
  }

  void absorb(Choice b) {
    if (!pending_) throw ContractViolation("Doubler absorb() called without a pending duel");
    sbm_.feedback(detail::right_won(b));
    next_pool_.push_back(pending_->right);
    pending_.reset();
    if (clock_.tick()) {
      left_pool_.swap(next_pool_);
      next_pool_.clear();
      next_pool_.reserve(detail::EpochClock::length(clock_.epoch()));
      sbm_.reset();
    }
  }

  std::size_t epoch() const noexcept { return clock_.epoch(); }
  /// Multiset the left arm is currently drawn from.
  const std::vector<ArmIndex>& left_multiset() const noexcept { return left_pool_; }
  /// Right arms played so far in the running epoch.
  const std::vector<ArmIndex>& epoch_rights() const noexcept { return next_pool_; }
  const Sbm& sbm() const noexcept { return sbm_; }
  std::optional<Duel> pending() const noexcept { return pending_; }

 private:
  Sbm sbm_;
  std::vector<ArmIndex> initial_pool_;
  detail::EpochClock clock_;
  std::vector<ArmIndex> left_pool_;
  std::vector<ArmIndex> next_pool_;
  std::optional<Duel> pending_;
};

/// A duel whose left arm is an arbitrary point of the arm space.
struct LinearDuel {
  Eigen::VectorXd left;
  ArmIndex right = 0;
};

/// Doubler for linear expected utilities. Instead of sampling the left arm
/// from last epoch's right multiset it plays the multiset's average vector,
/// which has the same expected utility and needs O(d) memory.
class AverageArmDoubler {
 public:
  explicit AverageArmDoubler(LinearSbm sbm, ArmIndex initial_left = 0)
      : sbm_(std::move(sbm)), initial_left_(initial_left) {
    if (initial_left_ >= sbm_.arm_count()) throw std::out_of_range("initial left arm out of range");
    reset();
  }

  void reset() {
    sbm_.reset();
    clock_.reset();
    average_ = sbm_.candidate(initial_left_);
    epoch_sum_ = Eigen::VectorXd::Zero(sbm_.dimension());
    pending_right_.reset();
  }

  /// The generator is unused; the signature matches the other solvers.
  LinearDuel propose(Rng& /*rng*/) {
    if (pending_right_) throw ContractViolation("Doubler propose() called while a choice is pending");
    pending_right_ = sbm_.advance();
    return LinearDuel{average_, *pending_right_};
  }

  void absorb(Choice b) {
    if (!pending_right_) throw ContractViolation("Doubler absorb() called without a pending duel");
    sbm_.feedback(detail::right_won(b));
    epoch_sum_ += sbm_.candidate(*pending_right_);
    pending_right_.reset();
    const auto played = static_cast<double>(clock_.elapsed() + 1);
    if (clock_.tick()) {
      average_ = epoch_sum_ / played;
      epoch_sum_.setZero();
      sbm_.reset();
    }
  }

  std::size_t epoch() const noexcept { return clock_.epoch(); }
  const Eigen::VectorXd& average_vector() const noexcept { return average_; }
  const LinearSbm& sbm() const noexcept { return sbm_; }

 private:
  LinearSbm sbm_;
  ArmIndex initial_left_;
  detail::EpochClock clock_;
  Eigen::VectorXd average_;
  Eigen::VectorXd epoch_sum_;
  std::optional<ArmIndex> pending_right_;
};

// ---------------------------------------------------------------------------
// MultiSBM

/// K machines, one per arm. The left arm of each duel is the previous right
/// arm; the machine indexed by the left arm picks the right arm and is fed
/// the choice bit (1 when the right arm wins).
template <SingletonBanditMachine Sbm>
class MultiSbm {
 public:
  explicit MultiSbm(std::vector<Sbm> machines, ArmIndex initial_right = 0)
      : machines_(std::move(machines)), initial_right_(initial_right) {
    if (machines_.empty()) throw std::invalid_argument("MultiSBM needs at least one machine");
    for (const auto& m : machines_) {
      if (m.arm_count() != machines_.size()) {
        throw std::invalid_argument("MultiSBM needs one machine per arm, each over all arms");
      }
    }
    if (initial_right_ >= machines_.size()) throw std::out_of_range("initial arm out of range");
    reset();
  }

  void reset() {
    for (auto& m : machines_) m.reset();
    previous_right_ = initial_right_;
    pending_.reset();
  }

  Duel propose(Rng& /*rng*/) {
    if (pending_) throw ContractViolation("MultiSBM propose() called while a choice is pending");
    const ArmIndex left = previous_right_;
    pending_ = Duel{left, machines_[left].advance()};
    return *pending_;
  }

  void absorb(Choice b) {
    if (!pending_) throw ContractViolation("MultiSBM absorb() called without a pending duel");
    machines_[pending_->left].feedback(detail::right_won(b));
    previous_right_ = pending_->right;
    pending_.reset();
  }

  const Sbm& machine(ArmIndex x) const { return machines_.at(x); }
  std::size_t arm_count() const noexcept { return machines_.size(); }
  ArmIndex previous_right() const noexcept { return previous_right_; }
  std::optional<Duel> pending() const noexcept { return pending_; }

 private:
  std::vector<Sbm> machines_;
  ArmIndex initial_right_;
  ArmIndex previous_right_ = 0;
  std::optional<Duel> pending_;
};

inline MultiSbm<UcbSbm> make_ucb_multisbm(std::size_t arm_count, double alpha) {
  return MultiSbm<UcbSbm>(std::vector<UcbSbm>(arm_count, UcbSbm(arm_count, alpha)));
}

// ---------------------------------------------------------------------------
// Sparring

/// Two machines play against each other: one picks the left arm, the other
/// the right, and whichever side the user chose gets reward 1.
template <SingletonBanditMachine Sbm>
class Sparring {
 public:
  Sparring(Sbm left, Sbm right) : left_(std::move(left)), right_(std::move(right)) { reset(); }

  void reset() {
    left_.reset();
    right_.reset();
    pending_.reset();
  }

  Duel propose(Rng& /*rng*/) {
    if (pending_) throw ContractViolation("Sparring propose() called while a choice is pending");
    const ArmIndex x = left_.advance();
    const ArmIndex y = right_.advance();
    pending_ = Duel{x, y};
    return *pending_;
  }

  void absorb(Choice b) {
    if (!pending_) throw ContractViolation("Sparring absorb() called without a pending duel");
    left_.feedback(detail::left_won(b));
    right_.feedback(detail::right_won(b));
    pending_.reset();
  }

  const Sbm& left_machine() const noexcept { return left_; }
  const Sbm& right_machine() const noexcept { return right_; }
  std::optional<Duel> pending() const noexcept { return pending_; }

 private:
  Sbm left_;
  Sbm right_;
  std::optional<Duel> pending_;
};

static_assert(DuelingSolver<Doubler<UcbSbm>>);
static_assert(DuelingSolver<MultiSbm<UcbSbm>>);
static_assert(DuelingSolver<Sparring<UcbSbm>>);

}  // namespace duelbandit
