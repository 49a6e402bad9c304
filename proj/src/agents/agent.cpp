#include "aerostar/agents/agent.hpp"

#include "aerostar/agents/learners.hpp"

#include <cmath>
#include <stdexcept>

namespace aerostar::agents {

std::string to_string(AgentKind kind) {
  switch (kind) {
    case AgentKind::DaDdpg: return "daddpg";
    case AgentKind::Ddpg: return "ddpg";
    case AgentKind::Dqn: return "dqn";
    case AgentKind::Random: return "random";
  }
  return "unknown";
}

AgentKind agent_kind_from(const std::string& name) {
  if (name == "daddpg") return AgentKind::DaDdpg;
  if (name == "ddpg") return AgentKind::Ddpg;
  if (name == "dqn") return AgentKind::Dqn;
  if (name == "random") return AgentKind::Random;
  throw std::invalid_argument("unknown agent '" + name + "'");
}

Agent::Agent(AgentConfig config, AgentContext context, std::uint64_t seed)
    : config_(config),
      context_(context),
      init_rng_(derive_seed(seed, "agent.init")),
      explore_rng_(derive_seed(seed, "agent.exploration")),
      replay_rng_(derive_seed(seed, "agent.replay")),
      buffer_(config.buffer_capacity) {
  if (!(config_.discount >= 0.0 && config_.discount <= 1.0)) {
    throw std::invalid_argument("discount must lie in [0, 1]");
  }
  if (!(config_.tau >= 0.0 && config_.tau <= 1.0)) throw std::invalid_argument("tau must lie in [0, 1]");
  if (!(config_.reward_scale > 0.0)) throw std::invalid_argument("reward_scale must be positive");
  if (config_.batch_size < 2) throw std::invalid_argument("batch_size must be >= 2 (batch norm)");
}

std::optional<TrainDiagnostics> Agent::train_step() {
  if (kind() == AgentKind::Random || buffer_.size() < config_.batch_size) return std::nullopt;
  return train_on_batch(buffer_.sample(config_.batch_size, replay_rng_));
}

std::unique_ptr<Agent> make_agent(AgentKind kind, const AgentConfig& config,
                                  const AgentContext& context, std::uint64_t seed) {
  switch (kind) {
    case AgentKind::DaDdpg: return std::make_unique<DaDdpgAgent>(config, context, seed);
    case AgentKind::Ddpg: return std::make_unique<DdpgAgent>(config, context, seed);
    case AgentKind::Dqn: return std::make_unique<DqnAgent>(config, context, seed);
    case AgentKind::Random: return std::make_unique<RandomAgent>(config, context, seed);
  }
  throw std::invalid_argument("unknown agent kind");
}

RandomAgent::RandomAgent(AgentConfig config, AgentContext context, std::uint64_t seed)
    : Agent(config, context, seed) {}

Decision RandomAgent::act(const Eigen::VectorXd&, bool) {
  Decision d;
  d.action.continuous.resize(context_.action.continuous_size());
  for (Eigen::Index i = 0; i < d.action.continuous.size(); ++i) {
    d.action.continuous(i) = explore_rng_.uniform(-1.0, 1.0);
  }
  d.action.discrete.resize(context_.action.discrete_size());
  for (Eigen::Index i = 0; i < d.action.discrete.size(); ++i) {
    d.action.discrete(i) = explore_rng_.bernoulli(0.5) ? 1 : -1;
  }
  d.critic_action = d.action.joined();
  return d;
}

nlohmann::json RandomAgent::checkpoint() const { return {{"kind", "random"}, {"version", 1}}; }

Eigen::VectorXd matched_filter_raw(const Eigen::VectorXd& state, const StateLayout& layout) {
  const Eigen::Index m = layout.bs_antennas;
  const Eigen::Index users = layout.users;
  Eigen::VectorXd raw = Eigen::VectorXd::Zero(2 * m * users);
  if (users == 0) return raw;
  const double per_user = 1.0 / std::sqrt(static_cast<double>(users));
  for (Eigen::Index j = 0; j < users; ++j) {
    CVector h(m);
    for (Eigen::Index a = 0; a < m; ++a) {
      const Eigen::Index k = layout.bs_user(j) + 2 * a;
      h(a) = Complex(state(k), state(k + 1));
    }
    const double norm = h.norm();
    CVector v = CVector::Zero(m);
    if (norm > 0.0) {
      v = h.conjugate() / norm;
    } else {
      v(0) = 1.0;
    }
    v *= per_user;
    for (Eigen::Index a = 0; a < m; ++a) {
      raw(2 * (j * m + a)) = v(a).real();
      raw(2 * (j * m + a) + 1) = v(a).imag();
    }
  }
  return raw;
}

}  // namespace aerostar::agents
