#pragma once

// Seeded Monte-Carlo replication of dueling-bandit runs and aggregation of
// cumulative regret curves.
//
// Run r of a cell uses seed base_seed + first_run + r. The seed fixes the arm
// permutation (when enabled), the solver's internal randomness and the
// environment's draws, so a cell is a pure function of its spec. Replications
// may run on several threads; results are always reduced in run order so the
// output does not depend on the thread count.

#include <algorithm>
#include <array>
#include <bit>
#include <atomic>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <cstdio>
#include <exception>
#include <mutex>
#include <optional>
#include <ostream>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <thread>
#include <variant>
#include <vector>

#include "duelbandit/core.hpp"
#include "duelbandit/env.hpp"
#include "duelbandit/reductions.hpp"
#include "duelbandit/sbm.hpp"
#include "duelbandit/scenarios.hpp"

namespace duelbandit {

enum class Algorithm { Doubler, MultiSbm, Sparring };

inline constexpr std::array<Algorithm, 3> kAllAlgorithms{Algorithm::Doubler, Algorithm::MultiSbm,
                                                        Algorithm::Sparring};

constexpr std::string_view to_string(Algorithm a) noexcept {
  switch (a) {
    case Algorithm::Doubler: return "doubler";
    case Algorithm::MultiSbm: return "multisbm";
    case Algorithm::Sparring: return "sparring";
  }
  return "unknown";
}

inline Algorithm parse_algorithm(std::string_view name) {
  for (auto a : kAllAlgorithms) {
    if (to_string(a) == name) return a;
  }
  throw std::invalid_argument("unknown algorithm '" + std::string(name) +
                              "' (expected doubler, multisbm or sparring)");
}

/// Powers of two 1, 2, 4, ... not exceeding the horizon.
inline std::vector<std::size_t> power_of_two_checkpoints(std::size_t horizon) {
  std::vector<std::size_t> out;
  for (std::size_t t = 1; t <= horizon && t != 0; t <<= 1) out.push_back(t);
  return out;
}

struct ScenarioSpec {
  ScenarioSpec(std::string scenario_name, Environment env)
      : name(std::move(scenario_name)), environment(std::move(env)) {}

  std::string name;
  Environment environment;
  std::vector<Algorithm> algorithms{kAllAlgorithms.begin(), kAllAlgorithms.end()};
  std::size_t horizon = 32768;
  std::size_t runs = 400;
  RandomSeed base_seed{0};
  /// Empty means power_of_two_checkpoints(horizon).
  std::vector<std::size_t> checkpoints;
  /// Relabel the arms with a seeded random permutation in every run.
  bool permute_arms = true;
  /// UCB alpha for every inner machine. When unset, Doubler and Sparring use
  /// 3 and MultiSBM uses max(3, ln K / ln ln T).
  std::optional<double> ucb_alpha;
  /// Index of the first run; lets a cell be split into seed-disjoint batches.
  std::size_t first_run = 0;

  std::vector<std::size_t> checkpoint_times() const {
    return checkpoints.empty() ? power_of_two_checkpoints(horizon) : checkpoints;
  }

  void validate() const {
    if (horizon == 0) throw std::invalid_argument("horizon must be positive");
    if (runs == 0) throw std::invalid_argument("run count must be positive");
    const auto times = checkpoint_times();
    if (times.empty()) throw std::invalid_argument("no checkpoints");
    if (horizon < times.front()) {
      throw std::invalid_argument("horizon " + std::to_string(horizon) +
                                  " is smaller than the first checkpoint " +
                                  std::to_string(times.front()));
    }
    for (std::size_t i = 0; i < times.size(); ++i) {
      if (times[i] == 0 || (i > 0 && times[i] <= times[i - 1])) {
        throw std::invalid_argument("checkpoint times must be positive and strictly increasing");
      }
    }
    if (times.back() > horizon) throw std::invalid_argument("last checkpoint exceeds the horizon");
    if (ucb_alpha && !(*ucb_alpha > 0.0)) throw std::invalid_argument("UCB alpha must be positive");
  }
};

struct CheckpointStat {
  std::size_t t = 0;
  double mean = 0.0;
  /// Sample standard deviation across runs (0 for a single run).
  double stddev = 0.0;
  std::size_t runs = 0;
};

struct CurveSummary {
  std::string scenario;
  Algorithm algorithm = Algorithm::Sparring;
  /// R^av for utility scenarios, eps-based regret for preference matrices.
  std::vector<CheckpointStat> points;
  /// R^choice; empty for preference matrices.
  std::vector<CheckpointStat> choice_points;
  /// Arm permutation of each run, in run order; empty when permutation is off.
  std::vector<std::vector<ArmIndex>> permutations;
  RandomSeed first_seed{0};
};

/// Running mean and second moment per checkpoint (Chan et al. merge).
class CurveAccumulator {
 public:
  explicit CurveAccumulator(std::vector<std::size_t> times)
      : times_(std::move(times)), mean_(times_.size(), 0.0), m2_(times_.size(), 0.0) {}

  void add(std::span<const double> values) {
    if (values.size() != times_.size()) throw std::invalid_argument("curve length mismatch");
    ++count_;
    const auto n = static_cast<double>(count_);
    for (std::size_t i = 0; i < values.size(); ++i) {
      const double delta = values[i] - mean_[i];
      mean_[i] += delta / n;
      m2_[i] += delta * (values[i] - mean_[i]);
    }
  }

  void merge(const CurveAccumulator& other) {
    if (other.times_ != times_) throw std::invalid_argument("merging curves with different checkpoints");
    if (other.count_ == 0) return;
    if (count_ == 0) {
      *this = other;
      return;
    }
    const auto na = static_cast<double>(count_);
    const auto nb = static_cast<double>(other.count_);
    const double n = na + nb;
    for (std::size_t i = 0; i < times_.size(); ++i) {
      const double delta = other.mean_[i] - mean_[i];
      mean_[i] += delta * nb / n;
      m2_[i] += other.m2_[i] + delta * delta * na * nb / n;
    }
    count_ += other.count_;
  }

  std::vector<CheckpointStat> summarize() const {
    std::vector<CheckpointStat> out(times_.size());
    for (std::size_t i = 0; i < times_.size(); ++i) {
      const double var = count_ > 1 ? m2_[i] / static_cast<double>(count_ - 1) : 0.0;
      out[i] = {times_[i], mean_[i], std::sqrt(std::max(0.0, var)), count_};
    }
    return out;
  }

  std::size_t count() const noexcept { return count_; }

 private:
  std::vector<std::size_t> times_;
  std::vector<double> mean_;
  std::vector<double> m2_;
  std::size_t count_ = 0;
};

// ---------------------------------------------------------------------------
// Single trajectories

struct Trajectory {
  /// Cumulative regret at each checkpoint.
  std::vector<double> regret;
  std::vector<double> choice_regret;
  std::vector<ArmIndex> permutation;
};

namespace detail {

template <DuelingSolver Solver>
void play(Solver& solver, const UtilityEnvironment& env, Rng& rng, RegretLedger& ledger,
          std::size_t horizon) {
  for (std::size_t t = 0; t < horizon; ++t) {
    const Duel duel = solver.propose(rng);
    const auto outcome = env.duel(duel.left, duel.right, rng);
    solver.absorb(outcome.choice);
    ledger.record_utility_step(regret_av_step(env, outcome.hidden),
                               regret_choice_step(env, outcome.choice, outcome.hidden));
  }
}

template <DuelingSolver Solver>
void play(Solver& solver, const PreferenceMatrixEnvironment& env, Rng& rng, RegretLedger& ledger,
          std::size_t horizon) {
  for (std::size_t t = 0; t < horizon; ++t) {
    const Duel duel = solver.propose(rng);
    const Choice b = env.duel(duel.left, duel.right, rng);
    solver.absorb(b);
    ledger.record_preference_step(regret_yj_step(env, duel.left, duel.right));
  }
}

using AnySolver = std::variant<Doubler<UcbSbm>, MultiSbm<UcbSbm>, Sparring<UcbSbm>>;

inline AnySolver make_solver(Algorithm algorithm, std::size_t arm_count, std::size_t horizon,
                             std::optional<double> alpha) {
  switch (algorithm) {
    case Algorithm::Doubler:
      return Doubler<UcbSbm>(UcbSbm(arm_count, alpha.value_or(UcbSbm::kDefaultAlpha)));
    case Algorithm::MultiSbm:
      return make_ucb_multisbm(arm_count, alpha.value_or(multisbm_alpha(arm_count, horizon)));
    case Algorithm::Sparring: {
      const double a = alpha.value_or(UcbSbm::kDefaultAlpha);
      return Sparring<UcbSbm>(UcbSbm(arm_count, a), UcbSbm(arm_count, a));
    }
  }
  throw std::invalid_argument("unknown algorithm");
}

inline std::size_t arm_count(const Environment& env) {
  return std::visit([](const auto& e) { return e.arm_count(); }, env);
}

}  // namespace detail

inline Trajectory run_trajectory(const Environment& environment, Algorithm algorithm,
                                 RandomSeed seed, std::size_t horizon,
                                 std::span<const std::size_t> checkpoints, bool permute_arms,
                                 std::optional<double> ucb_alpha = std::nullopt) {
  Rng rng(seed);
  const std::size_t k = detail::arm_count(environment);
  Trajectory out;
  if (permute_arms) out.permutation = rng.permutation(k);

  const Environment env =
      permute_arms ? std::visit([&](const auto& e) { return Environment(e.permuted(out.permutation)); },
                                environment)
                   : environment;
  const auto measure = std::holds_alternative<UtilityEnvironment>(env) ? RegretMeasure::Average
                                                                      : RegretMeasure::Preference;
  RegretLedger ledger(measure, {checkpoints.begin(), checkpoints.end()});
  auto solver = detail::make_solver(algorithm, k, horizon, ucb_alpha);
  std::visit([&](auto& s, const auto& e) { detail::play(s, e, rng, ledger, horizon); }, solver, env);

  out.regret.reserve(checkpoints.size());
  for (const auto& c : ledger.checkpoints()) {
    out.regret.push_back(c.regret);
    if (c.choice_regret) out.choice_regret.push_back(*c.choice_regret);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Cells

/// Runs every replication of one (scenario, algorithm) cell. `threads` = 0
/// picks the hardware concurrency.
inline CurveSummary run_cell(const ScenarioSpec& spec, Algorithm algorithm, unsigned threads = 0) {
  spec.validate();
  const auto times = spec.checkpoint_times();
  std::vector<Trajectory> runs(spec.runs);
  auto seed_of = [&](std::size_t r) {
    return RandomSeed{spec.base_seed.value + static_cast<std::uint64_t>(spec.first_run + r)};
  };
  auto work = [&](std::size_t r) {
    runs[r] = run_trajectory(spec.environment, algorithm, seed_of(r), spec.horizon, times,
                             spec.permute_arms, spec.ucb_alpha);
  };

  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(std::min<std::size_t>(threads, spec.runs));
  if (threads <= 1) {
    for (std::size_t r = 0; r < spec.runs; ++r) work(r);
  } else {
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    {
      std::vector<std::jthread> pool;
      pool.reserve(threads);
      for (unsigned w = 0; w < threads; ++w) {
        pool.emplace_back([&] {
          for (std::size_t r = next++; r < spec.runs; r = next++) {
            try {
              work(r);
            } catch (...) {
              std::lock_guard lock(failure_mutex);
              if (!failure) failure = std::current_exception();
            }
          }
        });
      }
    }
    if (failure) std::rethrow_exception(failure);
  }

  CurveAccumulator regret(times);
  CurveAccumulator choice(times);
  CurveSummary summary;
  summary.scenario = spec.name;
  summary.algorithm = algorithm;
  summary.first_seed = seed_of(0);
  for (auto& run : runs) {
    regret.add(run.regret);
    if (!run.choice_regret.empty()) choice.add(run.choice_regret);
    if (spec.permute_arms) summary.permutations.push_back(std::move(run.permutation));
  }
  summary.points = regret.summarize();
  if (choice.count() > 0) summary.choice_points = choice.summarize();
  return summary;
}

/// Merges two batches of the same cell (e.g. runs [0,200) and [200,400)).
inline CurveSummary merge_summaries(const CurveSummary& a, const CurveSummary& b) {
  if (a.scenario != b.scenario || a.algorithm != b.algorithm || a.points.size() != b.points.size()) {
    throw std::invalid_argument("cannot merge summaries of different cells");
  }
  auto combine = [](const std::vector<CheckpointStat>& x, const std::vector<CheckpointStat>& y) {
    std::vector<CheckpointStat> out(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
      if (x[i].t != y[i].t) throw std::invalid_argument("checkpoint schedules differ");
      const auto na = static_cast<double>(x[i].runs);
      const auto nb = static_cast<double>(y[i].runs);
      const double n = na + nb;
      const double delta = y[i].mean - x[i].mean;
      const double m2 = x[i].stddev * x[i].stddev * (na - 1.0) +
                        y[i].stddev * y[i].stddev * (nb - 1.0) + delta * delta * na * nb / n;
      out[i] = {x[i].t, x[i].mean + delta * nb / n, n > 1.0 ? std::sqrt(m2 / (n - 1.0)) : 0.0,
                x[i].runs + y[i].runs};
    }
    return out;
  };
  CurveSummary out = a;
  out.points = combine(a.points, b.points);
  if (!a.choice_points.empty() && !b.choice_points.empty()) {
    out.choice_points = combine(a.choice_points, b.choice_points);
  }
  out.permutations.insert(out.permutations.end(), b.permutations.begin(), b.permutations.end());
  out.first_seed = RandomSeed{std::min(a.first_seed.value, b.first_seed.value)};
  return out;
}

inline std::vector<CurveSummary> run_scenario(const ScenarioSpec& spec, unsigned threads = 0) {
  std::vector<CurveSummary> out;
  out.reserve(spec.algorithms.size());
  for (auto a : spec.algorithms) out.push_back(run_cell(spec, a, threads));
  return out;
}

// ---------------------------------------------------------------------------
// CSV

inline constexpr std::string_view kCsvHeader = "scenario,algorithm,t,log2_t,mean_regret,std_regret,runs";

namespace detail {

inline std::string fixed6(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6f", v);
  return buf;
}

inline std::string log2_field(std::size_t t) {
  if (t != 0 && (t & (t - 1)) == 0) {
    return std::to_string(std::countr_zero(static_cast<std::uint64_t>(t)));
  }
  return fixed6(std::log2(static_cast<double>(t)));
}

}  // namespace detail

/// One row per (scenario, algorithm, checkpoint) after a header row.
inline void emit_csv(std::span<const CurveSummary> summaries, std::ostream& out) {
  out << kCsvHeader << '\n';
  for (const auto& s : summaries) {
    for (const auto& p : s.points) {
      out << s.scenario << ',' << to_string(s.algorithm) << ',' << p.t << ','
          << detail::log2_field(p.t) << ',' << detail::fixed6(p.mean) << ','
          << detail::fixed6(p.stddev) << ',' << p.runs << '\n';
    }
  }
}

/// Per-run arm permutations: scenario,algorithm,run,seed,permutation where
/// the permutation lists, for each simulated arm, the built-in arm it maps to.
inline void emit_audit_csv(std::span<const CurveSummary> summaries, std::ostream& out) {
  out << "scenario,algorithm,run,seed,permutation\n";
  for (const auto& s : summaries) {
    for (std::size_t r = 0; r < s.permutations.size(); ++r) {
      out << s.scenario << ',' << to_string(s.algorithm) << ',' << r << ','
          << (s.first_seed.value + r) << ',';
      for (std::size_t i = 0; i < s.permutations[r].size(); ++i) {
        if (i) out << ' ';
        out << arm_name(s.permutations[r][i]);
      }
      out << '\n';
    }
  }
}

}  // namespace duelbandit
