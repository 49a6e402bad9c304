#pragma once

#include "aerostar/nn/critic.hpp"
#include "aerostar/nn/mlp.hpp"
#include "aerostar/nn/optim.hpp"

namespace aerostar::agents::detail {

// BN input, two ReLU hidden layers, tanh head initialized near zero.
inline nn::MlpSpec actor_spec(int input, int hidden, int output) {
  return nn::MlpSpec{{input, hidden, hidden, output},
                     {nn::Activation::Relu, nn::Activation::Relu, nn::Activation::Tanh},
                     true,
                     nn::OutputInit::SmallUniform};
}

template <typename Net>
void soft_update_net(Net& target, const Net& online, double tau) {
  nn::soft_update(target.parameters(), online.parameters(), tau);
  nn::soft_update(target.buffers(), online.buffers(), tau);
  target.touch();
}

template <typename Net>
void apply_adam(Net& net, const nn::Gradients& grads, nn::AdamState& state) {
  nn::adam_update(net.parameters(), grads, state);
  net.touch();
}

// +1 where x > 0, else -1.
inline Eigen::MatrixXd threshold_signs(const Eigen::MatrixXd& x) {
  return (x.array() > 0.0).select(Eigen::MatrixXd::Ones(x.rows(), x.cols()), -1.0);
}

inline Eigen::MatrixXd row(const Eigen::VectorXd& v) { return v.transpose(); }

}  // namespace aerostar::agents::detail
