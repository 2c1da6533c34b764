// Doubler over the vertices of the unit cube with a linear utility. The left
// arm is the average of last epoch's right arms, so it is usually an interior
// point rather than a vertex.

#include <iomanip>
#include <iostream>
#include <vector>

#include "duelbandit/duelbandit.hpp"

int main() {
  using namespace duelbandit;
  std::vector<Eigen::VectorXd> cube;
  for (int mask = 0; mask < 8; ++mask) {
    Eigen::VectorXd v(3);
    v << (mask & 1), ((mask >> 1) & 1), ((mask >> 2) & 1);
    cube.push_back(v);
  }
  const LinearUtilityEnvironment env(Eigen::Vector3d(0.5, 0.3, 0.2), cube);

  LinearSbmConfig config;
  config.fit_intercept = true;
  AverageArmDoubler doubler(LinearSbm(cube, config));
  Rng rng(RandomSeed{7});

  double epoch_regret = 0.0;
  std::size_t epoch = doubler.epoch();
  std::cout << std::fixed << std::setprecision(4);
  for (std::size_t t = 0; t < (1u << 14); ++t) {
    const LinearDuel d = doubler.propose(rng);
    const auto out = env.duel(d.left, cube[d.right], rng);
    doubler.absorb(out.choice);
    epoch_regret += env.regret_av_step(out.hidden);
    if (doubler.epoch() != epoch) {
      const double length = static_cast<double>(std::size_t{1} << epoch);
      std::cout << "epoch " << std::setw(2) << epoch << "  per-duel regret " << epoch_regret / length
                << "  next left arm (" << doubler.average_vector().transpose() << ")\n";
      epoch_regret = 0.0;
      epoch = doubler.epoch();
    }
  }
}
