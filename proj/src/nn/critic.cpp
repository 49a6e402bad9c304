#include "aerostar/nn/critic.hpp"

#include <stdexcept>

namespace aerostar::nn {

namespace {

template <typename Refs>
void append(Refs& out, const Refs& more) {
  out.insert(out.end(), more.begin(), more.end());
}

}  // namespace

Critic::Critic(CriticSpec spec, Rng& rng) : spec_(spec) {
  const int h = spec_.hidden;
  state_branch_ = Mlp(MlpSpec{{spec_.state_dim, h}, {Activation::Relu}, true}, rng);
  action_branch_ = Mlp(MlpSpec{{spec_.action_dim, h}, {Activation::Relu}, spec_.action_batch_norm}, rng);
  MlpSpec head{{2 * h, h, h, 1},
               {Activation::Relu, Activation::Relu, Activation::Linear},
               false,
               OutputInit::SmallUniform};
  head_ = Mlp(head, rng);
}

Critic Critic::from_parts(CriticSpec spec, Mlp state_branch, Mlp action_branch, Mlp head) {
  if (state_branch.spec().input() != spec.state_dim || action_branch.spec().input() != spec.action_dim ||
      head.spec().input() != state_branch.spec().output() + action_branch.spec().output() ||
      head.spec().output() != 1) {
    throw std::invalid_argument("Critic::from_parts: branch shapes do not fit the spec");
  }
  Critic c;
  c.spec_ = spec;
  c.state_branch_ = std::move(state_branch);
  c.action_branch_ = std::move(action_branch);
  c.head_ = std::move(head);
  return c;
}

Matrix Critic::forward(const Matrix& states, const Matrix& actions, Mode mode, Cache* cache,
                       bool update_stats) {
  if (states.rows() != actions.rows()) throw std::invalid_argument("Critic::forward: batch size mismatch");
  const Matrix hs = state_branch_.forward(states, mode, cache ? &cache->state : nullptr, update_stats);
  const Matrix ha = action_branch_.forward(actions, mode, cache ? &cache->action : nullptr, update_stats);
  Matrix joined(hs.rows(), hs.cols() + ha.cols());
  joined << hs, ha;
  return head_.forward(joined, mode, cache ? &cache->head : nullptr, update_stats);
}

Matrix Critic::forward(const Matrix& states, const Matrix& actions) const {
  if (states.rows() != actions.rows()) throw std::invalid_argument("Critic::forward: batch size mismatch");
  const Matrix hs = state_branch_.forward(states);
  const Matrix ha = action_branch_.forward(actions);
  Matrix joined(hs.rows(), hs.cols() + ha.cols());
  joined << hs, ha;
  return head_.forward(joined);
}

Matrix Critic::backward(const Cache& cache, const Matrix& upstream, Gradients& grads) const {
  Gradients g_head;
  Gradients g_state;
  Gradients g_action;
  const Matrix d_joined = head_.backward(cache.head, upstream, g_head);
  const Eigen::Index hs = state_branch_.spec().output();
  state_branch_.backward(cache.state, d_joined.leftCols(hs), g_state);
  Matrix d_action = action_branch_.backward(cache.action, d_joined.rightCols(d_joined.cols() - hs), g_action);
  grads.clear();
  grads.reserve(g_state.size() + g_action.size() + g_head.size());
  for (auto* g : {&g_state, &g_action, &g_head}) {
    for (auto& m : *g) grads.push_back(std::move(m));
  }
  return d_action;
}

ParamRefs Critic::parameters() {
  ParamRefs out = state_branch_.parameters();
  append(out, action_branch_.parameters());
  append(out, head_.parameters());
  return out;
}

ConstParamRefs Critic::parameters() const {
  ConstParamRefs out = state_branch_.parameters();
  append(out, action_branch_.parameters());
  append(out, head_.parameters());
  return out;
}

ParamRefs Critic::buffers() {
  ParamRefs out = state_branch_.buffers();
  append(out, action_branch_.buffers());
  append(out, head_.buffers());
  return out;
}

ConstParamRefs Critic::buffers() const {
  ConstParamRefs out = state_branch_.buffers();
  append(out, action_branch_.buffers());
  append(out, head_.buffers());
  return out;
}

void Critic::touch() {
  state_branch_.touch();
  action_branch_.touch();
  head_.touch();
}

}  // namespace aerostar::nn
