#pragma once

#include "aerostar/nn/mlp.hpp"

namespace aerostar::nn {

struct AdamState {
  double learning_rate = 5e-4;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
  long step = 0;
  std::vector<Matrix> first_moment;
  std::vector<Matrix> second_moment;
};

// One bias-corrected Adam step. Moments are allocated on the first call.
void adam_update(const ParamRefs& params, const Gradients& grads, AdamState& state);

// target <- (1 - tau) target + tau online, elementwise.
void soft_update(const ParamRefs& target, const ConstParamRefs& online, double tau);

double gradient_norm(const Gradients& grads);

}  // namespace aerostar::nn
