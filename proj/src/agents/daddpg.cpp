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

DaDdpgAgent::DaDdpgAgent(AgentConfig config, AgentContext context, std::uint64_t seed)
    : Agent(config, context, seed) {
  const auto s = static_cast<int>(context_.state.size());
  const auto c = static_cast<int>(context_.action.continuous_size());
  const auto d = static_cast<int>(context_.action.discrete_size());
  const int h = config_.hidden_for(context_.action.ris_elements);
  actor_c_ = nn::Mlp(detail::actor_spec(s, h, c), init_rng_);
  if (d > 0) actor_d_ = nn::Mlp(detail::actor_spec(s, h, d), init_rng_);
  critic_ = nn::Critic(nn::CriticSpec{s, c + d, h, true}, init_rng_);
  target_c_ = actor_c_;
  target_d_ = actor_d_;
  target_q_ = critic_;
  opt_c_.learning_rate = config_.actor_lr;
  opt_d_.learning_rate = config_.actor_lr;
  opt_q_.learning_rate = config_.critic_lr;
  ou_ = OuNoiseState{Eigen::VectorXd::Zero(c), config_.ou_theta, config_.ou_sigma, config_.ou_decay};
  epsilon_ = EpsilonSchedule{config_.epsilon_start, config_.epsilon_min, config_.epsilon_decay};
}

Decision DaDdpgAgent::act(const Eigen::VectorXd& state, bool explore) {
  if (state.size() != context_.state.size()) throw std::invalid_argument("act: state length mismatch");
  const Matrix s = row(state);
  Eigen::VectorXd cont = std::as_const(actor_c_).forward(s).row(0).transpose();
  if (explore) cont += ou_step(ou_, explore_rng_);
  cont = cont.cwiseMax(-1.0).cwiseMin(1.0);
  const Eigen::VectorXd logits = has_discrete()
                                     ? Eigen::VectorXd(std::as_const(actor_d_).forward(s).row(0).transpose())
                                     : Eigen::VectorXd();
  Decision out;
  out.action.continuous = std::move(cont);
  out.action.discrete = decode_discrete(logits, explore ? epsilon_.value : 0.0, explore_rng_);
  out.critic_action = out.action.joined();
  return out;
}

Eigen::VectorXd DaDdpgAgent::critic_target(const Batch& batch) const {
  if (batch.size() == 0) throw std::invalid_argument("critic_target: empty batch");
  const Matrix next_c = target_c_.forward(batch.next_states);
  const Matrix next_d = has_discrete() ? threshold_signs(target_d_.forward(batch.next_states))
                                       : Matrix(batch.size(), 0);
  Matrix next_a(batch.size(), next_c.cols() + next_d.cols());
  next_a << next_c, next_d;
  const Eigen::VectorXd q_next = target_q_.forward(batch.next_states, next_a).col(0);
  return config_.reward_scale * batch.rewards.array() +
         config_.discount * (1.0 - batch.terminal.array()) * q_next.array();
}

TrainDiagnostics DaDdpgAgent::train_on_batch(const Batch& batch) {
  const Eigen::Index b = batch.size();
  const Eigen::Index c = context_.action.continuous_size();
  const Eigen::Index d = context_.action.discrete_size();
  if (b < 2 || batch.actions.cols() != c + d) throw std::invalid_argument("train_on_batch: bad batch shape");
  TrainDiagnostics diag;

  // Critic regression toward the target-network backup.
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

  const Matrix ascend = Matrix::Constant(b, 1, -1.0 / static_cast<double>(b));
  nn::Gradients discard;

  // Continuous actor against the sampled discrete action.
  {
    nn::Mlp::Cache ac;
    const Matrix out = actor_c_.forward(batch.states, Mode::Train, &ac);
    Matrix joined(b, c + d);
    joined << out, batch.actions.rightCols(d);
    nn::Critic::Cache cc;
    critic_.forward(batch.states, joined, Mode::Eval, &cc);
    const Matrix da = critic_.backward(cc, ascend, discard);
    nn::Gradients g;
    actor_c_.backward(ac, da.leftCols(c), g);
    diag.actor_grad_norm = nn::gradient_norm(g);
    detail::apply_adam(actor_c_, g, opt_c_);
  }
  // Discrete actor through its tanh relaxation against the sampled continuous action.
  if (has_discrete()) {
    nn::Mlp::Cache ac;
    const Matrix out = actor_d_.forward(batch.states, Mode::Train, &ac);
    Matrix joined(b, c + d);
    joined << batch.actions.leftCols(c), out;
    nn::Critic::Cache cc;
    critic_.forward(batch.states, joined, Mode::Eval, &cc);
    const Matrix da = critic_.backward(cc, ascend, discard);
    nn::Gradients g;
    actor_d_.backward(ac, da.rightCols(d), g);
    diag.discrete_actor_grad_norm = nn::gradient_norm(g);
    detail::apply_adam(actor_d_, g, opt_d_);
  }

  detail::soft_update_net(target_q_, critic_, config_.tau);
  detail::soft_update_net(target_c_, actor_c_, config_.tau);
  if (has_discrete()) detail::soft_update_net(target_d_, actor_d_, config_.tau);
  return diag;
}

void DaDdpgAgent::end_episode() {
  ou_.end_episode();
  ou_.reset();
  epsilon_.end_episode();
}

nlohmann::json DaDdpgAgent::checkpoint() const {
  return {{"kind", "daddpg"},
          {"version", 1},
          {"actor_c", nn::to_json(actor_c_)},
          {"actor_d", has_discrete() ? nn::to_json(actor_d_) : nlohmann::json()},
          {"critic", nn::to_json(critic_)},
          {"target_c", nn::to_json(target_c_)},
          {"target_d", has_discrete() ? nn::to_json(target_d_) : nlohmann::json()},
          {"target_q", nn::to_json(target_q_)},
          {"opt_c", nn::to_json(opt_c_)},
          {"opt_d", nn::to_json(opt_d_)},
          {"opt_q", nn::to_json(opt_q_)},
          {"ou_sigma", ou_.sigma},
          {"epsilon", epsilon_.value}};
}

void DaDdpgAgent::restore(const nlohmann::json& j) {
  if (j.at("kind").get<std::string>() != "daddpg") throw std::invalid_argument("checkpoint is not a daddpg agent");
  nn::Mlp ac = nn::mlp_from_json(j.at("actor_c"));
  if (j.at("actor_d").is_null() == has_discrete()) {
    throw std::invalid_argument("checkpoint discrete actor does not match this environment");
  }
  nn::Mlp ad = has_discrete() ? nn::mlp_from_json(j.at("actor_d")) : nn::Mlp();
  nn::Critic q = nn::critic_from_json(j.at("critic"));
  if (!(ac.spec() == actor_c_.spec()) || !(ad.spec() == actor_d_.spec()) || !(q.spec() == critic_.spec())) {
    throw std::invalid_argument("checkpoint network shapes do not match this environment");
  }
  actor_c_ = std::move(ac);
  actor_d_ = std::move(ad);
  critic_ = std::move(q);
  target_c_ = nn::mlp_from_json(j.at("target_c"));
  if (has_discrete()) target_d_ = nn::mlp_from_json(j.at("target_d"));
  target_q_ = nn::critic_from_json(j.at("target_q"));
  opt_c_ = nn::adam_from_json(j.at("opt_c"));
  opt_d_ = nn::adam_from_json(j.at("opt_d"));
  opt_q_ = nn::adam_from_json(j.at("opt_q"));
  ou_.sigma = j.at("ou_sigma").get<double>();
  ou_.reset();
  epsilon_.value = j.at("epsilon").get<double>();
  actor_c_.touch();
  if (has_discrete()) actor_d_.touch();
  critic_.touch();
}

}  // namespace aerostar::agents
