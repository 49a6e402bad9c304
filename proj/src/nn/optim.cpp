#include "aerostar/nn/optim.hpp"

#include <cmath>
#include <stdexcept>

namespace aerostar::nn {

void adam_update(const ParamRefs& params, const Gradients& grads, AdamState& state) {
  if (params.size() != grads.size()) throw std::invalid_argument("adam_update: parameter/gradient count mismatch");
  if (state.first_moment.empty()) {
    for (const Matrix* p : params) {
      state.first_moment.push_back(Matrix::Zero(p->rows(), p->cols()));
      state.second_moment.push_back(Matrix::Zero(p->rows(), p->cols()));
    }
  }
  if (state.first_moment.size() != params.size()) throw std::invalid_argument("adam_update: state does not match parameters");
  for (std::size_t i = 0; i < params.size(); ++i) {
    if (params[i]->rows() != grads[i].rows() || params[i]->cols() != grads[i].cols() ||
        state.first_moment[i].rows() != grads[i].rows() || state.first_moment[i].cols() != grads[i].cols()) {
      throw std::invalid_argument("adam_update: shape mismatch");
    }
  }
  ++state.step;
  const double c1 = 1.0 - std::pow(state.beta1, static_cast<double>(state.step));
  const double c2 = 1.0 - std::pow(state.beta2, static_cast<double>(state.step));
  for (std::size_t i = 0; i < params.size(); ++i) {
    Matrix& m = state.first_moment[i];
    Matrix& v = state.second_moment[i];
    m = state.beta1 * m + (1.0 - state.beta1) * grads[i];
    v = state.beta2 * v + (1.0 - state.beta2) * grads[i].cwiseAbs2();
    params[i]->array() -= state.learning_rate * (m.array() / c1) /
                          ((v.array() / c2).sqrt() + state.epsilon);
  }
}

void soft_update(const ParamRefs& target, const ConstParamRefs& online, double tau) {
  if (target.size() != online.size()) throw std::invalid_argument("soft_update: tensor count mismatch");
  if (!(tau >= 0.0 && tau <= 1.0)) throw std::invalid_argument("soft_update: tau outside [0, 1]");
  for (std::size_t i = 0; i < target.size(); ++i) {
    if (target[i]->rows() != online[i]->rows() || target[i]->cols() != online[i]->cols()) {
      throw std::invalid_argument("soft_update: shape mismatch");
    }
    if (tau == 1.0) {
      *target[i] = *online[i];
    } else if (tau > 0.0) {
      *target[i] = (1.0 - tau) * *target[i] + tau * *online[i];
    }
  }
}

double gradient_norm(const Gradients& grads) {
  double sq = 0.0;
  for (const auto& g : grads) sq += g.squaredNorm();
  return std::sqrt(sq);
}

}  // namespace aerostar::nn
