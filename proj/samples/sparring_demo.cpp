// Plays Sparring against the geom utility row with the logit link and prints
// how often each arm is proposed late in the run.

#include <iostream>
#include <vector>

#include "duelbandit/duelbandit.hpp"

int main() {
  using namespace duelbandit;
  const UtilityEnvironment env({0.8, 0.7, 0.512, 0.374, 0.274, 0.2}, LinkFunction(LinkKind::Logit));
  Sparring<UcbSbm> solver(UcbSbm(env.arm_count()), UcbSbm(env.arm_count()));
  Rng rng(RandomSeed{2024});

  constexpr std::size_t kHorizon = 1 << 14;
  std::vector<std::size_t> late_pulls(env.arm_count(), 0);
  double regret = 0.0;
  for (std::size_t t = 0; t < kHorizon; ++t) {
    const Duel d = solver.propose(rng);
    const auto out = env.duel(d.left, d.right, rng);
    solver.absorb(out.choice);
    regret += regret_av_step(env, out.hidden);
    if (t >= kHorizon / 2) {
      ++late_pulls[d.left];
      ++late_pulls[d.right];
    }
  }

  std::cout << "cumulative average regret after " << kHorizon << " duels: " << regret << "\n";
  std::cout << "share of proposals in the second half:\n";
  for (ArmIndex x = 0; x < env.arm_count(); ++x) {
    std::cout << "  " << arm_name(x) << " (mu=" << env.mu(x) << "): "
              << static_cast<double>(late_pulls[x]) / static_cast<double>(kHorizon) << "\n";
  }
}
