#pragma once

#include "aerostar/agents/exploration.hpp"
#include "aerostar/agents/replay_buffer.hpp"
#include "aerostar/environment.hpp"

#include <json.hpp>

#include <memory>
#include <optional>
#include <string>

namespace aerostar::agents {

enum class AgentKind { DaDdpg, Ddpg, Dqn, Random };

std::string to_string(AgentKind kind);
AgentKind agent_kind_from(const std::string& name);

struct AgentConfig {
  int hidden = 0;  // 0 picks 256 for N <= 16, else 512
  double actor_lr = 5e-4;
  double critic_lr = 5e-4;
  double discount = 1.0;  // zeta
  double reward_scale = 1.0;  // critic sees scale * r; the policy objective is unchanged
  double tau = 0.005;
  std::size_t batch_size = 64;
  std::size_t buffer_capacity = 100000;
  double ou_theta = 0.15;
  double ou_sigma = 0.2;
  double ou_decay = 0.995;
  double epsilon_start = 1.0;
  double epsilon_min = 0.05;
  double epsilon_decay = 0.995;

  int hidden_for(Eigen::Index ris_elements) const {
    if (hidden > 0) return hidden;
    return ris_elements <= 16 ? 256 : 512;
  }
};

// Shapes an agent needs from its environment.
struct AgentContext {
  StateLayout state;
  ActionLayout action;
};

struct Decision {
  HybridAction action;
  Eigen::VectorXd critic_action;  // what gets stored in replay
  int action_index = -1;
};

struct TrainDiagnostics {
  double critic_loss = 0.0;
  double critic_grad_norm = 0.0;
  double actor_grad_norm = 0.0;           // continuous (or only) actor
  double discrete_actor_grad_norm = 0.0;  // dual-actor agent only
  double mean_q = 0.0;
};

class Agent {
 public:
  virtual ~Agent() = default;

  virtual AgentKind kind() const = 0;
  virtual Decision act(const Eigen::VectorXd& state, bool explore) = 0;

  void remember(Transition t) { buffer_.push(std::move(t)); }
  const ReplayBuffer& buffer() const { return buffer_; }

  // One update from a uniform minibatch; nullopt while the buffer is short.
  std::optional<TrainDiagnostics> train_step();
  virtual TrainDiagnostics train_on_batch(const Batch& batch) = 0;

  // Called once per finished episode; decays exploration.
  virtual void end_episode() {}

  virtual nlohmann::json checkpoint() const = 0;
  virtual void restore(const nlohmann::json& j) = 0;

  const AgentConfig& config() const { return config_; }
  const AgentContext& context() const { return context_; }

 protected:
  Agent(AgentConfig config, AgentContext context, std::uint64_t seed);

  AgentConfig config_;
  AgentContext context_;
  Rng init_rng_;
  Rng explore_rng_;
  Rng replay_rng_;
  ReplayBuffer buffer_;
};

std::unique_ptr<Agent> make_agent(AgentKind kind, const AgentConfig& config,
                                  const AgentContext& context, std::uint64_t seed);

}  // namespace aerostar::agents
