#include "aerostar/agents/exploration.hpp"

namespace aerostar::agents {

Eigen::VectorXd ou_step(OuNoiseState& state, Rng& rng) {
  for (Eigen::Index i = 0; i < state.x.size(); ++i) {
    state.x(i) += state.theta * (0.0 - state.x(i)) + state.sigma * rng.normal();
  }
  return state.x;
}

}  // namespace aerostar::agents
