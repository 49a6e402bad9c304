#pragma once

#include "aerostar/nn/mlp.hpp"

namespace aerostar::nn {

struct CriticSpec {
  int state_dim = 1;
  int action_dim = 1;
  int hidden = 256;
  bool action_batch_norm = true;

  bool operator==(const CriticSpec&) const = default;
};

// Q(s, a): the state and action each pass a normalized dense+ReLU branch,
// the branches are concatenated, then two dense+ReLU layers and a linear
// scalar head.
class Critic {
 public:
  struct Cache {
    Mlp::Cache state;
    Mlp::Cache action;
    Mlp::Cache head;
  };

  Critic() = default;
  Critic(CriticSpec spec, Rng& rng);

  const CriticSpec& spec() const { return spec_; }

  Matrix forward(const Matrix& states, const Matrix& actions, Mode mode, Cache* cache = nullptr,
                 bool update_stats = true);
  Matrix forward(const Matrix& states, const Matrix& actions) const;

  // Parameter gradients (order of parameters()) and dQ/d(action).
  Matrix backward(const Cache& cache, const Matrix& upstream, Gradients& grads) const;

  ParamRefs parameters();
  ConstParamRefs parameters() const;
  ParamRefs buffers();
  ConstParamRefs buffers() const;
  void touch();

  Mlp& state_branch() { return state_branch_; }
  const Mlp& state_branch() const { return state_branch_; }
  Mlp& action_branch() { return action_branch_; }
  const Mlp& action_branch() const { return action_branch_; }
  Mlp& head() { return head_; }
  const Mlp& head() const { return head_; }

  static Critic from_parts(CriticSpec spec, Mlp state_branch, Mlp action_branch, Mlp head);

 private:
  CriticSpec spec_;
  Mlp state_branch_;
  Mlp action_branch_;
  Mlp head_;
};

}  // namespace aerostar::nn
