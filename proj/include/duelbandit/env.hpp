#pragma once

// Simulated dueling environments and regret accounting.
//
// Environments hand back the latent utilities of a duel next to the choice
// bit, but in a separate struct: only the regret ledger consumes them.
// Solver code receives the Choice alone.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numeric>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "duelbandit/core.hpp"

namespace duelbandit {

namespace detail {

inline void require_arm(ArmIndex x, std::size_t arm_count) {
  if (x >= arm_count) {
    throw std::out_of_range("arm index " + std::to_string(x) + " out of range for " +
                            std::to_string(arm_count) + " arms");
  }
}

inline void require_permutation(std::span<const std::size_t> perm, std::size_t n) {
  if (perm.size() != n) throw std::invalid_argument("permutation has the wrong length");
  std::vector<bool> seen(n, false);
  for (auto p : perm) {
    if (p >= n || seen[p]) throw std::invalid_argument("not a permutation");
    seen[p] = true;
  }
}

}  // namespace detail

enum class UtilityNoise { Deterministic, Bernoulli };

/// Latent utilities of one duel. Ledger-only.
struct HiddenUtilities {
  double left = 0.0;
  double right = 0.0;
};

struct UtilityDuelOutcome {
  Choice choice = Choice::Left;
  HiddenUtilities hidden;
};

// ---------------------------------------------------------------------------

/// Finite arms with expected utilities mu and a link function turning the
/// drawn utility pair into a choice probability.
class UtilityEnvironment {
 public:
  UtilityEnvironment(std::vector<double> mu, LinkFunction link,
                     UtilityNoise noise = UtilityNoise::Deterministic)
      : mu_(std::move(mu)), link_(link), noise_(noise), gaps_(gap_profile(mu_)) {}

  UtilityDuelOutcome duel(ArmIndex x, ArmIndex y, Rng& rng) const {
    detail::require_arm(x, mu_.size());
    detail::require_arm(y, mu_.size());
    HiddenUtilities h{mu_[x], mu_[y]};
    if (noise_ == UtilityNoise::Bernoulli) {
      h.left = rng.bernoulli(mu_[x]) ? 1.0 : 0.0;
      h.right = rng.bernoulli(mu_[y]) ? 1.0 : 0.0;
    }
    const bool left_chosen = rng.bernoulli(link_.eval(h.left, h.right));
    return {left_chosen ? Choice::Left : Choice::Right, h};
  }

  /// Pr[b = 1], the right arm being chosen, given the expected utilities.
  /// Exact in deterministic mode; in Bernoulli mode it averages over the
  /// four utility outcomes.
  double right_win_probability(ArmIndex x, ArmIndex y) const {
    detail::require_arm(x, mu_.size());
    detail::require_arm(y, mu_.size());
    if (noise_ == UtilityNoise::Deterministic) return 1.0 - link_.eval(mu_[x], mu_[y]);
    double p = 0.0;
    for (int u = 0; u <= 1; ++u) {
      for (int v = 0; v <= 1; ++v) {
        const double weight = (u ? mu_[x] : 1.0 - mu_[x]) * (v ? mu_[y] : 1.0 - mu_[y]);
        p += weight * (1.0 - link_.eval(u, v));
      }
    }
    return p;
  }

  /// Same arms relabelled: arm i of the result is arm perm[i] of this one.
  UtilityEnvironment permuted(std::span<const std::size_t> perm) const {
    detail::require_permutation(perm, mu_.size());
    std::vector<double> mu(mu_.size());
    for (std::size_t i = 0; i < perm.size(); ++i) mu[i] = mu_[perm[i]];
    return UtilityEnvironment(std::move(mu), link_, noise_);
  }

  const std::vector<double>& mu() const noexcept { return mu_; }
  double mu(ArmIndex x) const { return mu_.at(x); }
  LinkFunction link() const noexcept { return link_; }
  UtilityNoise noise() const noexcept { return noise_; }
  const GapProfile& gaps() const noexcept { return gaps_; }
  ArmIndex best_arm() const noexcept { return gaps_.best_arm; }
  double best_utility() const noexcept { return mu_[gaps_.best_arm]; }
  std::size_t arm_count() const noexcept { return mu_.size(); }

 private:
  std::vector<double> mu_;
  LinkFunction link_;
  UtilityNoise noise_;
  GapProfile gaps_;
};

// ---------------------------------------------------------------------------

/// Preference-matrix environment: arm x beats arm y with probability
/// 1/2 + eps(x, y). The matrix must be antisymmetric with |eps| <= 1/2.
class PreferenceMatrixEnvironment {
 public:
  static constexpr double kTolerance = 1e-12;

  /// The implied order lists arms from best to worst. When omitted it is
  /// inferred: more positive entries first, then larger row sum, then
  /// lower index.
  explicit PreferenceMatrixEnvironment(Eigen::MatrixXd epsilon,
                                       std::optional<std::vector<ArmIndex>> order = std::nullopt)
      : epsilon_(std::move(epsilon)) {
    validate(epsilon_);
    const auto k = static_cast<std::size_t>(epsilon_.rows());
    if (order) {
      detail::require_permutation(*order, k);
      order_ = std::move(*order);
    } else {
      order_ = infer_order(epsilon_);
    }
  }

  static void validate(const Eigen::MatrixXd& eps) {
    if (eps.rows() == 0 || eps.rows() != eps.cols()) {
      throw std::invalid_argument("preference matrix must be square and nonempty");
    }
    if (!eps.allFinite()) throw std::invalid_argument("preference matrix has non-finite entries");
    for (Eigen::Index i = 0; i < eps.rows(); ++i) {
      for (Eigen::Index j = 0; j < eps.cols(); ++j) {
        if (std::abs(eps(i, j) + eps(j, i)) > kTolerance) {
          throw std::invalid_argument("preference matrix is not antisymmetric at (" +
                                      std::to_string(i) + "," + std::to_string(j) + ")");
        }
        if (std::abs(eps(i, j)) > 0.5 + kTolerance) {
          throw std::invalid_argument("preference matrix entry exceeds 1/2 in magnitude");
        }
      }
    }
  }

  static std::vector<ArmIndex> infer_order(const Eigen::MatrixXd& eps) {
    const auto k = static_cast<std::size_t>(eps.rows());
    std::vector<ArmIndex> order(k);
    std::iota(order.begin(), order.end(), ArmIndex{0});
    std::vector<std::size_t> wins(k, 0);
    std::vector<double> sums(k, 0.0);
    for (std::size_t i = 0; i < k; ++i) {
      for (std::size_t j = 0; j < k; ++j) {
        const double e = eps(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
        if (e > 0.0) ++wins[i];
        sums[i] += e;
      }
    }
    std::stable_sort(order.begin(), order.end(), [&](ArmIndex a, ArmIndex b) {
      if (wins[a] != wins[b]) return wins[a] > wins[b];
      return sums[a] > sums[b];
    });
    return order;
  }

  Choice duel(ArmIndex x, ArmIndex y, Rng& rng) const {
    return rng.bernoulli(left_win_probability(x, y)) ? Choice::Left : Choice::Right;
  }

  double left_win_probability(ArmIndex x, ArmIndex y) const { return 0.5 + epsilon(x, y); }

  double epsilon(ArmIndex x, ArmIndex y) const {
    detail::require_arm(x, arm_count());
    detail::require_arm(y, arm_count());
    return epsilon_(static_cast<Eigen::Index>(x), static_cast<Eigen::Index>(y));
  }

  PreferenceMatrixEnvironment permuted(std::span<const std::size_t> perm) const {
    const auto k = arm_count();
    detail::require_permutation(perm, k);
    Eigen::MatrixXd eps(epsilon_.rows(), epsilon_.cols());
    std::vector<ArmIndex> inverse(k);
    for (std::size_t i = 0; i < k; ++i) {
      inverse[perm[i]] = i;
      for (std::size_t j = 0; j < k; ++j) {
        eps(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
            epsilon_(static_cast<Eigen::Index>(perm[i]), static_cast<Eigen::Index>(perm[j]));
      }
    }
    std::vector<ArmIndex> order(k);
    for (std::size_t r = 0; r < k; ++r) order[r] = inverse[order_[r]];
    return PreferenceMatrixEnvironment(std::move(eps), std::move(order));
  }

  const Eigen::MatrixXd& matrix() const noexcept { return epsilon_; }
  const std::vector<ArmIndex>& implied_order() const noexcept { return order_; }
  ArmIndex best_arm() const noexcept { return order_.front(); }
  std::size_t arm_count() const noexcept { return static_cast<std::size_t>(epsilon_.rows()); }

 private:
  Eigen::MatrixXd epsilon_;
  std::vector<ArmIndex> order_;
};

/// eps(x, y) = (mu(x) - mu(y)) / 2, the matrix a linear link induces on
/// deterministic utilities.
inline Eigen::MatrixXd linear_preference_matrix(std::span<const double> mu) {
  const auto k = static_cast<Eigen::Index>(mu.size());
  Eigen::MatrixXd eps(k, k);
  for (Eigen::Index i = 0; i < k; ++i) {
    for (Eigen::Index j = 0; j < k; ++j) {
      eps(i, j) = (mu[static_cast<std::size_t>(i)] - mu[static_cast<std::size_t>(j)]) / 2.0;
    }
  }
  return eps;
}

// ---------------------------------------------------------------------------
// Per-step regret

/// mu(x*) - (u + v) / 2.
inline double regret_av_step(const UtilityEnvironment& env, const HiddenUtilities& h) {
  return env.best_utility() - (h.left + h.right) / 2.0;
}

/// mu(x*) minus the utility of the alternative the user actually chose.
inline double regret_choice_step(const UtilityEnvironment& env, Choice b, const HiddenUtilities& h) {
  return env.best_utility() - (b == Choice::Left ? h.left : h.right);
}

/// (eps(x*, x) + eps(x*, y)) / 2 with x* the top of the implied order.
inline double regret_yj_step(const PreferenceMatrixEnvironment& env, ArmIndex x, ArmIndex y) {
  const ArmIndex best = env.best_arm();
  return 0.5 * (env.epsilon(best, x) + env.epsilon(best, y));
}

/// Expected choice regret of a fixed utility pair:
/// best - [phi(u,v) u + phi(v,u) v].
inline double expected_choice_regret(LinkFunction link, double best, double u, double v) {
  return best - (link.eval(u, v) * u + link.eval(v, u) * v);
}

inline double expected_av_regret(double best, double u, double v) { return best - (u + v) / 2.0; }

// ---------------------------------------------------------------------------
// Regret ledger

enum class RegretMeasure {
  /// Utility environments: R^av is the headline measure, R^choice is kept too.
  Average,
  /// Preference-matrix environments: only the eps-based regret exists.
  Preference,
};

struct LedgerCheckpoint {
  std::size_t t = 0;
  double regret = 0.0;
  std::optional<double> choice_regret;
};

/// Cumulative regret with snapshots at fixed times. Checkpoint times must be
/// strictly increasing.
class RegretLedger {
 public:
  RegretLedger(RegretMeasure measure, std::vector<std::size_t> checkpoint_times)
      : measure_(measure), schedule_(std::move(checkpoint_times)) {
    for (std::size_t i = 0; i < schedule_.size(); ++i) {
      if (schedule_[i] == 0 || (i > 0 && schedule_[i] <= schedule_[i - 1])) {
        throw std::invalid_argument("checkpoint times must be positive and strictly increasing");
      }
    }
    checkpoints_.reserve(schedule_.size());
  }

  void record_utility_step(double av, double choice) {
    if (measure_ != RegretMeasure::Average) {
      throw std::logic_error("utility regret recorded in a preference-matrix ledger");
    }
    regret_ += av;
    choice_regret_ += choice;
    advance_time();
  }

  void record_preference_step(double yj) {
    if (measure_ != RegretMeasure::Preference) {
      throw std::logic_error("preference regret recorded in a utility ledger");
    }
    regret_ += yj;
    advance_time();
  }

  RegretMeasure measure() const noexcept { return measure_; }
  std::size_t time() const noexcept { return t_; }
  /// R^av in utility environments, the eps-based regret otherwise.
  double cumulative_regret() const noexcept { return regret_; }
  std::optional<double> cumulative_choice_regret() const noexcept {
    if (measure_ == RegretMeasure::Average) return choice_regret_;
    return std::nullopt;
  }
  const std::vector<LedgerCheckpoint>& checkpoints() const noexcept { return checkpoints_; }

 private:
  void advance_time() {
    ++t_;
    if (checkpoints_.size() < schedule_.size() && schedule_[checkpoints_.size()] == t_) {
      checkpoints_.push_back({t_, regret_, cumulative_choice_regret()});
    }
  }

  RegretMeasure measure_;
  std::vector<std::size_t> schedule_;
  std::vector<LedgerCheckpoint> checkpoints_;
  std::size_t t_ = 0;
  double regret_ = 0.0;
  double choice_regret_ = 0.0;
};

// ---------------------------------------------------------------------------

/// Arms are vectors and the expected utility is linear: mu(x) = <theta, x>.
/// Utilities are deterministic. Any point whose utility stays in [0,1] can be
/// played, in particular averages of candidate arms.
class LinearUtilityEnvironment {
 public:
  LinearUtilityEnvironment(Eigen::VectorXd theta, std::vector<Eigen::VectorXd> candidates,
                           LinkFunction link = LinkFunction(LinkKind::Linear))
      : theta_(std::move(theta)), candidates_(std::move(candidates)), link_(link) {
    if (candidates_.empty()) throw std::invalid_argument("linear environment needs candidate arms");
    std::vector<double> values;
    values.reserve(candidates_.size());
    for (const auto& c : candidates_) {
      if (c.size() != theta_.size()) throw std::invalid_argument("candidate dimension mismatch");
      values.push_back(utility(c));
    }
    best_ = argmax(values);
    best_utility_ = values[best_];
  }

  double utility(const Eigen::VectorXd& x) const {
    if (x.size() != theta_.size()) throw std::invalid_argument("arm dimension mismatch");
    const double u = theta_.dot(x);
    detail::require_unit_interval(u, "linear utility");
    return u;
  }

  UtilityDuelOutcome duel(const Eigen::VectorXd& x, const Eigen::VectorXd& y, Rng& rng) const {
    HiddenUtilities h{utility(x), utility(y)};
    const bool left_chosen = rng.bernoulli(link_.eval(h.left, h.right));
    return {left_chosen ? Choice::Left : Choice::Right, h};
  }

  double regret_av_step(const HiddenUtilities& h) const {
    return best_utility_ - (h.left + h.right) / 2.0;
  }

  const Eigen::VectorXd& theta() const noexcept { return theta_; }
  const std::vector<Eigen::VectorXd>& candidates() const noexcept { return candidates_; }
  ArmIndex best_arm() const noexcept { return best_; }
  double best_utility() const noexcept { return best_utility_; }
  /// Smallest utility gap between the best candidate and any other one.
  double gap() const {
    double g = std::numeric_limits<double>::infinity();
    for (ArmIndex i = 0; i < candidates_.size(); ++i) {
      if (i != best_) g = std::min(g, best_utility_ - theta_.dot(candidates_[i]));
    }
    return g;
  }

 private:
  Eigen::VectorXd theta_;
  std::vector<Eigen::VectorXd> candidates_;
  LinkFunction link_;
  ArmIndex best_ = 0;
  double best_utility_ = 0.0;
};

// ---------------------------------------------------------------------------

/// Plain stochastic MAB with Bernoulli rewards, used by the dueling-to-MAB
/// adapter and the UCB property suites.
class BernoulliMab {
 public:
  explicit BernoulliMab(std::vector<double> mu) : mu_(std::move(mu)), gaps_(gap_profile(mu_)) {}

  double pull(ArmIndex x, Rng& rng) const {
    detail::require_arm(x, mu_.size());
    return rng.bernoulli(mu_[x]) ? 1.0 : 0.0;
  }

  double gap(ArmIndex x) const { return gaps_.gaps.at(x); }
  const std::vector<double>& mu() const noexcept { return mu_; }
  const GapProfile& gaps() const noexcept { return gaps_; }
  std::size_t arm_count() const noexcept { return mu_.size(); }

 private:
  std::vector<double> mu_;
  GapProfile gaps_;
};

}  // namespace duelbandit
