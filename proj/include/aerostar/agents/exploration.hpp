#pragma once

#include "aerostar/numerics.hpp"

#include <algorithm>

namespace aerostar::agents {

// Discrete Ornstein-Uhlenbeck process around zero with unit time step.
struct OuNoiseState {
  Eigen::VectorXd x;
  double theta = 0.15;
  double sigma = 0.2;
  double decay = 0.995;  // applied to sigma once per episode

  void reset() { x.setZero(); }
  void end_episode() { sigma *= decay; }
};

Eigen::VectorXd ou_step(OuNoiseState& state, Rng& rng);

// Multiplicative per-episode decay with a floor.
struct EpsilonSchedule {
  double value = 1.0;
  double floor = 0.05;
  double decay = 0.995;

  void end_episode() { value = std::max(floor, value * decay); }
};

}  // namespace aerostar::agents
