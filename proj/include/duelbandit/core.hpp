#pragma once

// Value types shared across the library: link functions, choice outcomes,
// the seeded random stream and gap profiles.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <optional>
#include <random>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace duelbandit {

using ArmIndex = std::size_t;

/// Letter label of an arm: A, B, C, ... then #26, #27, ...
inline std::string arm_name(ArmIndex x) {
  if (x < 26) return std::string(1, static_cast<char>('A' + x));
  return "#" + std::to_string(x);
}

/// Raised when a stateful component is driven out of its call protocol
/// (advance/feedback or propose/absorb out of order).
class ContractViolation : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

namespace detail {

inline void require_unit_interval(double value, const char* what) {
  if (!(value >= 0.0 && value <= 1.0)) {
    throw std::out_of_range(std::string(what) + " must lie in [0,1], got " +
                            std::to_string(value));
  }
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Choice outcome

/// Which side of a duel the user picked. Left is bit 0, right is bit 1.
enum class Choice : std::uint8_t { Left = 0, Right = 1 };

constexpr int to_bit(Choice c) noexcept { return static_cast<int>(c); }

constexpr Choice choice_from_bit(int bit) {
  if (bit != 0 && bit != 1) throw std::invalid_argument("choice bit must be 0 or 1");
  return bit == 0 ? Choice::Left : Choice::Right;
}

// ---------------------------------------------------------------------------
// Link functions

enum class LinkKind { Linear, Natural, Logit };

constexpr std::string_view to_string(LinkKind kind) noexcept {
  switch (kind) {
    case LinkKind::Linear: return "linear";
    case LinkKind::Natural: return "natural";
    case LinkKind::Logit: return "logit";
  }
  return "unknown";
}

inline LinkKind parse_link_kind(std::string_view name) {
  if (name == "linear") return LinkKind::Linear;
  if (name == "natural") return LinkKind::Natural;
  if (name == "logit") return LinkKind::Logit;
  throw std::invalid_argument("unknown link function '" + std::string(name) + "'");
}

/// Maps a pair of latent utilities (left, right) to the probability that the
/// left alternative is chosen. The right-win probability is the complement,
/// which by construction equals eval(right, left).
class LinkFunction {
 public:
  constexpr LinkFunction() = default;
  constexpr explicit LinkFunction(LinkKind kind) : kind_(kind) {}

  constexpr LinkKind kind() const noexcept { return kind_; }

  double eval(double u, double v) const {
    detail::require_unit_interval(u, "left utility");
    detail::require_unit_interval(v, "right utility");
    switch (kind_) {
      case LinkKind::Linear:
        return (1.0 + u - v) / 2.0;
      case LinkKind::Natural:
        // 0/0 completed symmetrically.
        if (u + v == 0.0) return 0.5;
        return u / (u + v);
      case LinkKind::Logit:
        return 1.0 / (1.0 + std::exp(v - u));
    }
    return 0.5;
  }

  double operator()(double u, double v) const { return eval(u, v); }

  friend constexpr bool operator==(LinkFunction, LinkFunction) = default;

 private:
  LinkKind kind_ = LinkKind::Linear;
};

inline double link_eval(LinkFunction link, double u, double v) { return link.eval(u, v); }

// ---------------------------------------------------------------------------
// Randomness

struct RandomSeed {
  std::uint64_t value = 0;
  friend constexpr bool operator==(RandomSeed, RandomSeed) = default;
};

constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// Seeded pseudo-random stream. Built on mt19937_64 with hand-rolled
/// variate generation so that trajectories are bit-identical across
/// standard library implementations (std distributions are not).
class Rng {
 public:
  using result_type = std::uint64_t;

  explicit Rng(RandomSeed seed) : engine_(splitmix64(seed.value)) {}

  static constexpr result_type min() noexcept { return std::mt19937_64::min(); }
  static constexpr result_type max() noexcept { return std::mt19937_64::max(); }
  result_type operator()() { return engine_(); }

  /// Uniform on [0,1) with 53 bits of resolution.
  double uniform01() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  bool bernoulli(double p) { return uniform01() < p; }

  /// Uniform integer in [0, n). Rejection sampling keeps it unbiased.
  std::size_t index(std::size_t n) {
    if (n == 0) throw std::invalid_argument("cannot draw an index from an empty range");
    const std::uint64_t bound = static_cast<std::uint64_t>(n);
    // 2^64 mod bound; draws below it would over-represent small residues.
    const std::uint64_t threshold = (0 - bound) % bound;
    std::uint64_t draw = engine_();
    while (draw < threshold) draw = engine_();
    return static_cast<std::size_t>(draw % bound);
  }

  /// Uniformly random permutation of 0..n-1 (Fisher-Yates).
  std::vector<std::size_t> permutation(std::size_t n) {
    std::vector<std::size_t> perm(n);
    for (std::size_t i = 0; i < n; ++i) perm[i] = i;
    for (std::size_t i = n; i > 1; --i) std::swap(perm[i - 1], perm[index(i)]);
    return perm;
  }

 private:
  std::mt19937_64 engine_;
};

// ---------------------------------------------------------------------------
// Gap profile

/// Per-arm gaps to the best arm and the hardness H = sum of reciprocal gaps.
struct GapProfile {
  std::vector<double> gaps;
  /// Empty when some non-best arm ties the best one.
  std::optional<double> hardness;
  ArmIndex best_arm = 0;
};

/// Index of the largest value, lowest index on ties.
inline ArmIndex argmax(std::span<const double> values) {
  if (values.empty()) throw std::invalid_argument("argmax of an empty list");
  ArmIndex best = 0;
  for (ArmIndex i = 1; i < values.size(); ++i) {
    if (values[i] > values[best]) best = i;
  }
  return best;
}

inline GapProfile gap_profile(std::span<const double> mu) {
  if (mu.empty()) throw std::invalid_argument("gap profile needs at least one arm");
  for (double m : mu) detail::require_unit_interval(m, "expected utility");

  GapProfile profile;
  profile.best_arm = argmax(mu);
  const double top = mu[profile.best_arm];
  profile.gaps.reserve(mu.size());
  double h = 0.0;
  bool defined = true;
  for (ArmIndex x = 0; x < mu.size(); ++x) {
    const double gap = top - mu[x];
    profile.gaps.push_back(gap);
    if (x == profile.best_arm) continue;
    if (gap > 0.0) {
      h += 1.0 / gap;
    } else {
      defined = false;
    }
  }
  if (defined) profile.hardness = h;
  return profile;
}

}  // namespace duelbandit
