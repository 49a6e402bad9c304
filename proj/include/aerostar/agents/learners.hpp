#pragma once

#include "aerostar/agents/agent.hpp"
#include "aerostar/nn/critic.hpp"
#include "aerostar/nn/mlp.hpp"
#include "aerostar/nn/optim.hpp"

namespace aerostar::agents {

// Separate deterministic actors for the continuous block and the coupling
// signs, one critic over the joined action.
class DaDdpgAgent final : public Agent {
 public:
  DaDdpgAgent(AgentConfig config, AgentContext context, std::uint64_t seed);

  AgentKind kind() const override { return AgentKind::DaDdpg; }
  Decision act(const Eigen::VectorXd& state, bool explore) override;
  TrainDiagnostics train_on_batch(const Batch& batch) override;
  void end_episode() override;
  nlohmann::json checkpoint() const override;
  void restore(const nlohmann::json& j) override;

  // r + zeta * Q'(s', mu_c'(s'), sign(mu_d'(s'))); terminal rows keep r.
  Eigen::VectorXd critic_target(const Batch& batch) const;

  nn::Mlp& continuous_actor() { return actor_c_; }
  nn::Mlp& discrete_actor() { return actor_d_; }
  nn::Critic& critic() { return critic_; }
  const nn::Mlp& continuous_target() const { return target_c_; }
  const nn::Mlp& discrete_target() const { return target_d_; }
  const nn::Critic& critic_target_net() const { return target_q_; }
  OuNoiseState& ou() { return ou_; }
  EpsilonSchedule& epsilon() { return epsilon_; }
  // False for independent-phase surfaces, which carry no coupling signs.
  bool has_discrete() const { return context_.action.discrete_size() > 0; }

 private:
  nn::Mlp actor_c_, actor_d_, target_c_, target_d_;
  nn::Critic critic_, target_q_;
  nn::AdamState opt_c_, opt_d_, opt_q_;
  OuNoiseState ou_;
  EpsilonSchedule epsilon_;
};

// One actor emitting the continuous block and the sign logits together;
// the tail is thresholded at execution time.
class DdpgAgent final : public Agent {
 public:
  DdpgAgent(AgentConfig config, AgentContext context, std::uint64_t seed);

  AgentKind kind() const override { return AgentKind::Ddpg; }
  Decision act(const Eigen::VectorXd& state, bool explore) override;
  TrainDiagnostics train_on_batch(const Batch& batch) override;
  void end_episode() override;
  nlohmann::json checkpoint() const override;
  void restore(const nlohmann::json& j) override;

  Eigen::VectorXd critic_target(const Batch& batch) const;

  nn::Mlp& actor() { return actor_; }
  nn::Critic& critic() { return critic_; }
  Eigen::Index action_size() const { return actor_.spec().output(); }

 private:
  nn::Mlp actor_, target_actor_;
  nn::Critic critic_, target_q_;
  nn::AdamState opt_a_, opt_q_;
  OuNoiseState ou_;
  EpsilonSchedule epsilon_;
};

// Q-learning over a factored codebook: 7 motion primitives x 16 surface
// patterns. The beamformer is matched to each user's direct channel.
class DqnAgent final : public Agent {
 public:
  static constexpr int kMotions = 7;
  static constexpr int kPatterns = 16;
  static constexpr int kActions = kMotions * kPatterns;

  DqnAgent(AgentConfig config, AgentContext context, std::uint64_t seed);

  AgentKind kind() const override { return AgentKind::Dqn; }
  Decision act(const Eigen::VectorXd& state, bool explore) override;
  TrainDiagnostics train_on_batch(const Batch& batch) override;
  void end_episode() override;
  nlohmann::json checkpoint() const override;
  void restore(const nlohmann::json& j) override;

  Eigen::VectorXd critic_target(const Batch& batch) const;
  // Raw hybrid action for codebook entry `index` given the observed state.
  HybridAction decode_index(int index, const Eigen::VectorXd& state) const;

  nn::Mlp& q_network() { return q_; }
  EpsilonSchedule& epsilon() { return epsilon_; }

 private:
  nn::Mlp q_, target_;
  nn::AdamState opt_;
  EpsilonSchedule epsilon_;
};

// Uniform random actions; never trains.
class RandomAgent final : public Agent {
 public:
  RandomAgent(AgentConfig config, AgentContext context, std::uint64_t seed);

  AgentKind kind() const override { return AgentKind::Random; }
  Decision act(const Eigen::VectorXd& state, bool explore) override;
  TrainDiagnostics train_on_batch(const Batch&) override { return {}; }
  nlohmann::json checkpoint() const override;
  void restore(const nlohmann::json&) override {}
};

// Matched-filter raws toward each user's direct channel, equal split of a
// unit budget (the environment projection rescales to the power limit).
Eigen::VectorXd matched_filter_raw(const Eigen::VectorXd& state, const StateLayout& layout);

}  // namespace aerostar::agents
