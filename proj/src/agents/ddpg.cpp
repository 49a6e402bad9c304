#include "aerostar/agents/learners.hpp"

#include "aerostar/nn/serialize.hpp"

#include "common.hpp"

#include <stdexcept>
#include <utility>

namespace aerostar::agents {

using detail::row;
using detail::threshold_signs;
using nn::Matrix;
using nn::Mode;

DdpgAgent::DdpgAgent(AgentConfig config, AgentContext context, std::uint64_t seed)
    : Agent(config, context, seed) {
  const auto s = static_cast<int>(context_.state.size());
  const auto c = static_cast<int>(context_.action.continuous_size());
  const auto d = static_cast<int>(context_.action.discrete_size());
  const int h = config_.hidden_for(context_.action.ris_elements);
  actor_ = nn::Mlp(detail::actor_spec(s, h, c + d), init_rng_);
  critic_ = nn::Critic(nn::CriticSpec{s, c + d, h, true}, init_rng_);
  target_actor_ = actor_;
  target_q_ = critic_;
  opt_a_.learning_rate = config_.actor_lr;
  opt_q_.learning_rate = config_.critic_lr;
  ou_ = OuNoiseState{Eigen::VectorXd::Zero(c), config_.ou_theta, config_.ou_sigma, config_.ou_decay};
  epsilon_ = EpsilonSchedule{config_.epsilon_start, config_.epsilon_min, config_.epsilon_decay};
}

Decision DdpgAgent::act(const Eigen::VectorXd& state, bool explore) {
  if (state.size() != context_.state.size()) throw std::invalid_argument("act: state length mismatch");
  const Eigen::Index c = context_.action.continuous_size();
  const Eigen::Index d = context_.action.discrete_size();
  const Eigen::VectorXd out = std::as_const(actor_).forward(row(state)).row(0).transpose();
  Eigen::VectorXd cont = out.head(c);
  if (explore) cont += ou_step(ou_, explore_rng_);
  Decision dec;
  dec.action.continuous = cont.cwiseMax(-1.0).cwiseMin(1.0);
  dec.action.discrete = decode_discrete(out.tail(d), explore ? epsilon_.value : 0.0, explore_rng_);
  dec.critic_action = dec.action.joined();
  return dec;
}

Eigen::VectorXd DdpgAgent::critic_target(const Batch& batch) const {
  if (batch.size() == 0) throw std::invalid_argument("critic_target: empty batch");
  const Eigen::Index d = context_.action.discrete_size();
  Matrix next_a = target_actor_.forward(batch.next_states);
  next_a.rightCols(d) = threshold_signs(next_a.rightCols(d));
  const Eigen::VectorXd q_next = target_q_.forward(batch.next_states, next_a).col(0);
  return config_.reward_scale * batch.rewards.array() +
         config_.discount * (1.0 - batch.terminal.array()) * q_next.array();
}

TrainDiagnostics DdpgAgent::train_on_batch(const Batch& batch) {
  const Eigen::Index b = batch.size();
  if (b < 2 || batch.actions.cols() != action_size()) throw std::invalid_argument("train_on_batch: bad batch shape");
  TrainDiagnostics diag;

  const Eigen::VectorXd y = critic_target(batch);
  nn::Critic::Cache qc;
  const Eigen::VectorXd q = critic_.forward(batch.states, batch.actions, Mode::Train, &qc).col(0);
  const Eigen::VectorXd err = q - y;
  diag.critic_loss = err.squaredNorm() / static_cast<double>(b);
  diag.mean_q = q.mean();
  nn::Gradients gq;
  critic_.backward(qc, (2.0 / static_cast<double>(b)) * err, gq);
  diag.critic_grad_norm = nn::gradient_norm(gq);
  detail::apply_adam(critic_, gq, opt_q_);

  nn::Mlp::Cache ac;
  const Matrix out = actor_.forward(batch.states, Mode::Train, &ac);
  nn::Critic::Cache cc;
  critic_.forward(batch.states, out, Mode::Eval, &cc);
  nn::Gradients discard;
  const Matrix da = critic_.backward(cc, Matrix::Constant(b, 1, -1.0 / static_cast<double>(b)), discard);
  nn::Gradients g;
  actor_.backward(ac, da, g);
  diag.actor_grad_norm = nn::gradient_norm(g);
  detail::apply_adam(actor_, g, opt_a_);

  detail::soft_update_net(target_q_, critic_, config_.tau);
  detail::soft_update_net(target_actor_, actor_, config_.tau);
  return diag;
}

void DdpgAgent::end_episode() {
  ou_.end_episode();
  ou_.reset();
  epsilon_.end_episode();
}

nlohmann::json DdpgAgent::checkpoint() const {
  return {{"kind", "ddpg"},
          {"version", 1},
          {"actor", nn::to_json(actor_)},
          {"critic", nn::to_json(critic_)},
          {"target_actor", nn::to_json(target_actor_)},
          {"target_q", nn::to_json(target_q_)},
          {"opt_a", nn::to_json(opt_a_)},
          {"opt_q", nn::to_json(opt_q_)},
          {"ou_sigma", ou_.sigma},
          {"epsilon", epsilon_.value}};
}

void DdpgAgent::restore(const nlohmann::json& j) {
  if (j.at("kind").get<std::string>() != "ddpg") throw std::invalid_argument("checkpoint is not a ddpg agent");
  nn::Mlp a = nn::mlp_from_json(j.at("actor"));
  nn::Critic q = nn::critic_from_json(j.at("critic"));
  if (!(a.spec() == actor_.spec()) || !(q.spec() == critic_.spec())) {
    throw std::invalid_argument("checkpoint network shapes do not match this environment");
  }
  actor_ = std::move(a);
  critic_ = std::move(q);
  target_actor_ = nn::mlp_from_json(j.at("target_actor"));
  target_q_ = nn::critic_from_json(j.at("target_q"));
  opt_a_ = nn::adam_from_json(j.at("opt_a"));
  opt_q_ = nn::adam_from_json(j.at("opt_q"));
  ou_.sigma = j.at("ou_sigma").get<double>();
  ou_.reset();
  epsilon_.value = j.at("epsilon").get<double>();
  actor_.touch();
  critic_.touch();
}

}  // namespace aerostar::agents
