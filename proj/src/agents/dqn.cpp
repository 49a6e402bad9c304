#include "aerostar/agents/learners.hpp"

#include "aerostar/nn/serialize.hpp"

#include "common.hpp"

#include <numbers>
#include <stdexcept>
#include <utility>

namespace aerostar::agents {

using detail::row;
using nn::Matrix;
using nn::Mode;

namespace {

constexpr double kPi = std::numbers::pi;

struct MotionRaw {
  double speed;
  double elevation;
  double azimuth;
};

// hover, +x, -x, +y, -y, +z, -z in the environment's raw action scale.
constexpr MotionRaw kMotionRaw[DqnAgent::kMotions] = {
    {-1.0, 0.0, -1.0}, {1.0, 0.0, -1.0}, {1.0, 0.0, 0.0}, {1.0, 0.0, -0.5},
    {1.0, 0.0, 0.5},   {1.0, 1.0, -1.0}, {1.0, -1.0, -1.0}};

constexpr double kThetaRaw[4] = {0.0, 0.5, -0.5, 1.0};  // 0, pi/2, -pi/2, pi
constexpr double kBeta[2] = {0.3, 0.7};

}  // namespace

DqnAgent::DqnAgent(AgentConfig config, AgentContext context, std::uint64_t seed)
    : Agent(config, context, seed) {
  const auto s = static_cast<int>(context_.state.size());
  const int h = config_.hidden_for(context_.action.ris_elements);
  nn::MlpSpec spec{{s, h, h, kActions},
                   {nn::Activation::Relu, nn::Activation::Relu, nn::Activation::Linear},
                   true,
                   nn::OutputInit::SmallUniform};
  q_ = nn::Mlp(spec, init_rng_);
  target_ = q_;
  opt_.learning_rate = config_.critic_lr;
  epsilon_ = EpsilonSchedule{config_.epsilon_start, config_.epsilon_min, config_.epsilon_decay};
}

HybridAction DqnAgent::decode_index(int index, const Eigen::VectorXd& state) const {
  if (index < 0 || index >= kActions) throw std::out_of_range("decode_index: index outside the codebook");
  const ActionLayout& layout = context_.action;
  const Eigen::Index n = layout.ris_elements;
  const MotionRaw& motion = kMotionRaw[index / kPatterns];
  const int pattern = index % kPatterns;
  const double theta = kThetaRaw[pattern % 4];
  const double beta = kBeta[(pattern / 4) % 2];
  const int sign = pattern / 8 == 0 ? 1 : -1;

  HybridAction a;
  a.continuous = Eigen::VectorXd::Zero(layout.continuous_size());
  a.continuous(0) = motion.speed;
  a.continuous(1) = motion.elevation;
  a.continuous(2) = motion.azimuth;
  a.continuous.segment(layout.theta_r(), n).setConstant(theta);
  a.continuous.segment(layout.beta_t(), n).setConstant(2.0 * beta - 1.0);
  if (layout.free_transmit_phase) {
    const double theta_t = wrap_phase(theta * kPi + sign * kPi / 2.0) / kPi;
    a.continuous.segment(layout.theta_t(), n).setConstant(theta_t);
  }
  a.continuous.tail(2 * layout.bs_antennas * layout.users) = matched_filter_raw(state, context_.state);
  a.discrete = Eigen::VectorXi::Constant(layout.discrete_size(), sign);
  return a;
}

Decision DqnAgent::act(const Eigen::VectorXd& state, bool explore) {
  if (state.size() != context_.state.size()) throw std::invalid_argument("act: state length mismatch");
  int index = 0;
  if (explore && explore_rng_.bernoulli(epsilon_.value)) {
    index = static_cast<int>(explore_rng_.index(kActions));
  } else {
    std::as_const(q_).forward(row(state)).row(0).maxCoeff(&index);
  }
  Decision d;
  d.action = decode_index(index, state);
  d.critic_action = d.action.joined();
  d.action_index = index;
  return d;
}

Eigen::VectorXd DqnAgent::critic_target(const Batch& batch) const {
  if (batch.size() == 0) throw std::invalid_argument("critic_target: empty batch");
  const Eigen::VectorXd q_next = target_.forward(batch.next_states).rowwise().maxCoeff();
  return config_.reward_scale * batch.rewards.array() +
         config_.discount * (1.0 - batch.terminal.array()) * q_next.array();
}

TrainDiagnostics DqnAgent::train_on_batch(const Batch& batch) {
  const Eigen::Index b = batch.size();
  if (b < 2) throw std::invalid_argument("train_on_batch: bad batch shape");
  for (Eigen::Index i = 0; i < b; ++i) {
    if (batch.action_indices(i) < 0 || batch.action_indices(i) >= kActions) {
      throw std::invalid_argument("train_on_batch: transition lacks a codebook index");
    }
  }
  TrainDiagnostics diag;
  const Eigen::VectorXd y = critic_target(batch);
  nn::Mlp::Cache cache;
  const Matrix q = q_.forward(batch.states, Mode::Train, &cache);
  Matrix upstream = Matrix::Zero(b, kActions);
  double loss = 0.0;
  double mean_q = 0.0;
  for (Eigen::Index i = 0; i < b; ++i) {
    const double qi = q(i, batch.action_indices(i));
    const double err = qi - y(i);
    loss += err * err;
    mean_q += qi;
    upstream(i, batch.action_indices(i)) = 2.0 * err / static_cast<double>(b);
  }
  diag.critic_loss = loss / static_cast<double>(b);
  diag.mean_q = mean_q / static_cast<double>(b);
  nn::Gradients g;
  q_.backward(cache, upstream, g);
  diag.critic_grad_norm = nn::gradient_norm(g);
  detail::apply_adam(q_, g, opt_);
  detail::soft_update_net(target_, q_, config_.tau);
  return diag;
}

void DqnAgent::end_episode() { epsilon_.end_episode(); }

nlohmann::json DqnAgent::checkpoint() const {
  return {{"kind", "dqn"},
          {"version", 1},
          {"q", nn::to_json(q_)},
          {"target", nn::to_json(target_)},
          {"opt", nn::to_json(opt_)},
          {"epsilon", epsilon_.value}};
}

void DqnAgent::restore(const nlohmann::json& j) {
  if (j.at("kind").get<std::string>() != "dqn") throw std::invalid_argument("checkpoint is not a dqn agent");
  nn::Mlp q = nn::mlp_from_json(j.at("q"));
  if (!(q.spec() == q_.spec())) throw std::invalid_argument("checkpoint network shapes do not match this environment");
  q_ = std::move(q);
  target_ = nn::mlp_from_json(j.at("target"));
  opt_ = nn::adam_from_json(j.at("opt"));
  epsilon_.value = j.at("epsilon").get<double>();
  q_.touch();
}

}  // namespace aerostar::agents
