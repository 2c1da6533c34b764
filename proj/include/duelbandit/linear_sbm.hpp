#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <stdexcept>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "duelbandit/core.hpp"
#include "duelbandit/sbm.hpp"

namespace duelbandit {

struct LinearSbmConfig {
  /// Ridge regularizer; the Gram accumulator starts at lambda * I.
  double lambda = 1.0;
  /// Append a constant 1 coordinate to every arm so affine rewards are
  /// representable. The accumulators then live in dimension d + 1.
  bool fit_intercept = false;
  /// Sub-Gaussian constant of the reward noise, multiplying the
  /// sqrt(d ln(1 + t)) part of the confidence radius. Rewards in [0,1] are
  /// 1/2-sub-Gaussian.
  double noise_scale = 0.5;
};

/// Optimistic linear bandit over a finite candidate set (for example the
/// vertices of a polytope). Each round it plays the candidate maximizing
///
///   <theta_hat, x> + beta_t * ||x||_{G^-1}
///
/// where G is the regularized Gram matrix of played arms, theta_hat the
/// ridge estimate G^-1 * sum(r * x), and
///
///   beta_t = sigma * sqrt(d * ln(1 + t)) + 1
///
/// with t the number of completed rounds and sigma the noise scale (1/2 by
/// default). Ties go to the lowest index.
class LinearSbm {
 public:
  using Vector = Eigen::VectorXd;
  using Matrix = Eigen::MatrixXd;

  explicit LinearSbm(std::vector<Vector> candidates, LinearSbmConfig config = {})
      : config_(config), candidates_(std::move(candidates)) {
    if (candidates_.empty()) throw std::invalid_argument("linear SBM needs at least one candidate arm");
    const auto dim = candidates_.front().size();
    if (dim == 0) throw std::invalid_argument("candidate arms must have positive dimension");
    for (const auto& c : candidates_) {
      if (c.size() != dim) throw std::invalid_argument("candidate arms differ in dimension");
      if (!c.allFinite()) throw std::invalid_argument("candidate arms must be finite");
    }
    if (!(config_.lambda > 0.0)) throw std::invalid_argument("regularizer lambda must be positive");
    features_.reserve(candidates_.size());
    for (const auto& c : candidates_) features_.push_back(feature(c));
    reset();
  }

  void reset() {
    const auto d = feature_dimension();
    gram_ = config_.lambda * Matrix::Identity(d, d);
    reward_sum_ = Vector::Zero(d);
    rounds_ = 0;
    pending_.reset();
  }

  ArmIndex advance() {
    if (pending_) throw ContractViolation("linear SBM advance() called while feedback is pending");
    const Eigen::LDLT<Matrix> solver(gram_);
    const Vector theta = solver.solve(reward_sum_);
    const double scale = confidence_scale();
    ArmIndex best = 0;
    double best_value = -std::numeric_limits<double>::infinity();
    for (ArmIndex i = 0; i < features_.size(); ++i) {
      const Vector& z = features_[i];
      const double width = std::sqrt(std::max(0.0, z.dot(solver.solve(z))));
      const double value = theta.dot(z) + scale * width;
      if (value > best_value) {
        best = i;
        best_value = value;
      }
    }
    pending_ = best;
    return best;
  }

  void feedback(double reward) {
    if (!pending_) throw ContractViolation("linear SBM feedback() called without a pending advance()");
    detail::require_unit_interval(reward, "reward");
    const Vector& z = features_[*pending_];
    gram_.noalias() += z * z.transpose();
    reward_sum_ += reward * z;
    ++rounds_;
    pending_.reset();
  }

  /// Optimistic value of candidate i under the current state.
  double optimistic_value(ArmIndex i) const {
    const Eigen::LDLT<Matrix> solver(gram_);
    const Vector& z = features_.at(i);
    return solver.solve(reward_sum_).dot(z) +
           confidence_scale() * std::sqrt(std::max(0.0, z.dot(solver.solve(z))));
  }

  double confidence_scale() const {
    const auto d = static_cast<double>(feature_dimension());
    return config_.noise_scale * std::sqrt(d * std::log(1.0 + static_cast<double>(rounds_))) + 1.0;
  }

  /// Ridge estimate of the reward coefficients (in feature space).
  Vector estimate() const { return Eigen::LDLT<Matrix>(gram_).solve(reward_sum_); }

  const Matrix& gram() const noexcept { return gram_; }
  const Vector& reward_sum() const noexcept { return reward_sum_; }
  const Vector& candidate(ArmIndex i) const { return candidates_.at(i); }
  const std::vector<Vector>& candidates() const noexcept { return candidates_; }
  std::size_t arm_count() const noexcept { return candidates_.size(); }
  /// Dimension of the arm vectors as supplied (without intercept).
  Eigen::Index dimension() const noexcept { return candidates_.front().size(); }
  std::size_t rounds() const noexcept { return rounds_; }
  std::optional<ArmIndex> pending_arm() const noexcept { return pending_; }

 private:
  Eigen::Index feature_dimension() const noexcept {
    return dimension() + (config_.fit_intercept ? 1 : 0);
  }

  Vector feature(const Vector& arm) const {
    if (!config_.fit_intercept) return arm;
    Vector z(arm.size() + 1);
    z << arm, 1.0;
    return z;
  }

  LinearSbmConfig config_;
  std::vector<Vector> candidates_;
  std::vector<Vector> features_;
  Matrix gram_;
  Vector reward_sum_;
  std::size_t rounds_ = 0;
  std::optional<ArmIndex> pending_;
};

static_assert(SingletonBanditMachine<LinearSbm>);

}  // namespace duelbandit
