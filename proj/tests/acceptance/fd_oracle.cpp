#include "fd_oracle.hpp"

#include "aerostar/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace aerostar::acceptance {

OracleStack::OracleStack(const nn::Mlp& net) : norm_(net.spec().input_batch_norm), eps_(net.spec().bn_epsilon) {
  if (norm_) {
    gamma_ = net.bn_gamma().row(0);
    beta_ = net.bn_beta().row(0);
  }
  for (std::size_t l = 0; l < net.spec().layers(); ++l) {
    layers_.push_back({net.weight(l), net.bias(l).row(0), net.spec().activations[l]});
  }
}

MatrixXd OracleStack::apply(nn::Activation act, const MatrixXd& z) {
  MatrixXd a = z;
  for (Eigen::Index i = 0; i < a.size(); ++i) {
    double& v = a.data()[i];
    switch (act) {
      case nn::Activation::Relu: v = v > 0.0 ? v : 0.0; break;
      case nn::Activation::Tanh: v = std::tanh(v); break;
      case nn::Activation::Linear: break;
    }
  }
  return a;
}

MatrixXd OracleStack::evaluate(const MatrixXd& x) const {
  const Eigen::Index b = x.rows();
  MatrixXd a = x;
  if (norm_) {
    for (Eigen::Index c = 0; c < x.cols(); ++c) {
      double mean = 0.0;
      for (Eigen::Index r = 0; r < b; ++r) mean += x(r, c);
      mean /= static_cast<double>(b);
      double var = 0.0;
      for (Eigen::Index r = 0; r < b; ++r) var += (x(r, c) - mean) * (x(r, c) - mean);
      var /= static_cast<double>(b);
      const double scale = 1.0 / std::sqrt(var + eps_);
      for (Eigen::Index r = 0; r < b; ++r) a(r, c) = gamma_(c) * (x(r, c) - mean) * scale + beta_(c);
    }
  }
  for (const auto& layer : layers_) {
    MatrixXd z = a * layer.w;
    z.rowwise() += layer.b;
    a = apply(layer.act, z);
  }
  return a;
}

void OracleStack::forward(const MatrixXd& x) {
  const Eigen::Index b = x.rows();
  a_.assign(1, x);
  z_.clear();
  if (norm_) {
    xhat_ = x;
    for (Eigen::Index c = 0; c < x.cols(); ++c) {
      double mean = 0.0;
      for (Eigen::Index r = 0; r < b; ++r) mean += x(r, c);
      mean /= static_cast<double>(b);
      double var = 0.0;
      for (Eigen::Index r = 0; r < b; ++r) var += (x(r, c) - mean) * (x(r, c) - mean);
      var /= static_cast<double>(b);
      const double scale = 1.0 / std::sqrt(var + eps_);
      for (Eigen::Index r = 0; r < b; ++r) {
        xhat_(r, c) = (x(r, c) - mean) * scale;
        a_[0](r, c) = gamma_(c) * xhat_(r, c) + beta_(c);
      }
    }
  }
  for (const auto& layer : layers_) {
    MatrixXd z = a_.back() * layer.w;
    z.rowwise() += layer.b;
    a_.push_back(apply(layer.act, z));
    z_.push_back(std::move(z));
  }
}

MatrixXd OracleStack::output_with_column_delta(std::size_t k, Eigen::Index col, const VectorXd& delta) const {
  if (k == layers_.size()) {
    MatrixXd out = a_.back();
    out.col(col) += delta;
    return out;
  }
  // Rank-one update of the next pre-activation, then a plain forward pass.
  MatrixXd z = z_[k] + delta * layers_[k].w.row(col);
  MatrixXd a = apply(layers_[k].act, z);
  for (std::size_t l = k + 1; l < layers_.size(); ++l) {
    z = a * layers_[l].w;
    z.rowwise() += layers_[l].b;
    a = apply(layers_[l].act, z);
  }
  return a;
}

VectorXd OracleStack::column_delta(std::size_t l, Eigen::Index i, Eigen::Index j, double h) const {
  MatrixXd z = z_[l].col(j);
  if (i < 0) {
    z.array() += h;
  } else {
    z += h * a_[l].col(i);
  }
  return apply(layers_[l].act, z) - a_[l + 1].col(j);
}

double OracleStack::min_relu_margin() const {
  double margin = std::numeric_limits<double>::infinity();
  for (std::size_t l = 0; l < layers_.size(); ++l) {
    if (layers_[l].act == nn::Activation::Relu) margin = std::min(margin, z_[l].cwiseAbs().minCoeff());
  }
  return margin;
}

double relative_error(double analytic, double numeric, double floor) {
  return std::abs(analytic - numeric) / std::max({std::abs(analytic), std::abs(numeric), floor});
}

namespace {

constexpr double kKinkMargin = 1e-4;
constexpr int kMaxRedraws = 200;

MatrixXd gaussian(Rng& rng, Eigen::Index rows, Eigen::Index cols) {
  MatrixXd m(rows, cols);
  for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = rng.normal();
  return m;
}

double weighted_sum(const MatrixXd& out, const MatrixXd& u) { return (out.array() * u.array()).sum(); }

void record(GradCheckReport& report, double analytic, double numeric) {
  report.max_relative_error = std::max(report.max_relative_error, relative_error(analytic, numeric));
  ++report.parameters_checked;
}

// Dense-layer parameters of `stack`: perturbation enters activation column j
// of layer l, and `loss_of` maps (activation index, column, delta) to a loss.
template <typename LossOfDelta>
void check_dense(const OracleStack& stack, const nn::Gradients& grads, std::size_t grad_offset, double h,
                 GradCheckReport& report, LossOfDelta loss_of) {
  for (std::size_t l = 0; l < stack.layers(); ++l) {
    const auto& layer = stack.layer(l);
    const MatrixXd& gw = grads[grad_offset + 2 * l];
    const MatrixXd& gb = grads[grad_offset + 2 * l + 1];
    for (Eigen::Index j = 0; j < layer.w.cols(); ++j) {
      for (Eigen::Index i = -1; i < layer.w.rows(); ++i) {
        const double up = loss_of(l + 1, j, stack.column_delta(l, i, j, h));
        const double down = loss_of(l + 1, j, stack.column_delta(l, i, j, -h));
        const double numeric = (up - down) / (2.0 * h);
        record(report, i < 0 ? gb(0, j) : gw(i, j), numeric);
      }
    }
  }
}

// Input normalization scale/shift: full re-evaluation with an edited copy.
template <typename LossOfStack>
void check_norm(const OracleStack& stack, const nn::Gradients& grads, std::size_t grad_offset, double h,
                GradCheckReport& report, LossOfStack loss_of) {
  if (!stack.has_norm()) return;
  for (int which = 0; which < 2; ++which) {
    const MatrixXd& g = grads[grad_offset + static_cast<std::size_t>(which)];
    for (Eigen::Index c = 0; c < g.cols(); ++c) {
      OracleStack edited = stack;
      auto& target = which == 0 ? edited.gamma() : edited.beta();
      const double base = target(c);
      target(c) = base + h;
      const double up = loss_of(edited);
      target(c) = base - h;
      const double down = loss_of(edited);
      record(report, g(0, c), (up - down) / (2.0 * h));
    }
  }
}

}  // namespace

GradCheckReport check_mlp_gradients(nn::Mlp& net, int batches, int batch_size, std::uint64_t seed, double h) {
  Rng rng(seed);
  GradCheckReport report;
  OracleStack oracle(net);
  for (int batch = 0; batch < batches; ++batch) {
    MatrixXd x = gaussian(rng, batch_size, net.spec().input());
    oracle.forward(x);
    while (oracle.min_relu_margin() < kKinkMargin) {
      if (++report.redraws > kMaxRedraws) throw std::runtime_error("gradient check: inputs keep landing on ReLU kinks");
      x = gaussian(rng, batch_size, net.spec().input());
      oracle.forward(x);
    }
    const MatrixXd u = gaussian(rng, batch_size, net.spec().output());

    nn::Mlp::Cache cache;
    const MatrixXd out = net.forward(x, nn::Mode::Train, &cache, false);
    if ((out - oracle.output()).cwiseAbs().maxCoeff() > 1e-10) {
      throw std::runtime_error("gradient check: oracle forward disagrees with the network");
    }
    nn::Gradients grads;
    net.backward(cache, u, grads);

    const std::size_t offset = net.spec().input_batch_norm ? 2 : 0;
    check_norm(oracle, grads, 0, h, report,
               [&](const OracleStack& edited) { return weighted_sum(edited.evaluate(x), u); });
    check_dense(oracle, grads, offset, h, report, [&](std::size_t k, Eigen::Index col, const VectorXd& d) {
      return weighted_sum(oracle.output_with_column_delta(k, col, d), u);
    });
    ++report.batches;
  }
  return report;
}

GradCheckReport check_critic_gradients(nn::Critic& critic, int batches, int batch_size, std::uint64_t seed,
                                       double h) {
  Rng rng(seed);
  GradCheckReport report;
  OracleStack state_branch(critic.state_branch());
  OracleStack action_branch(critic.action_branch());
  OracleStack head(critic.head());
  const int sd = critic.spec().state_dim;
  const int ad = critic.spec().action_dim;

  const auto joined = [](const MatrixXd& hs, const MatrixXd& ha) {
    MatrixXd j(hs.rows(), hs.cols() + ha.cols());
    j << hs, ha;
    return j;
  };

  for (int batch = 0; batch < batches; ++batch) {
    MatrixXd xs, xa;
    while (true) {
      xs = gaussian(rng, batch_size, sd);
      xa = gaussian(rng, batch_size, ad);
      state_branch.forward(xs);
      action_branch.forward(xa);
      head.forward(joined(state_branch.output(), action_branch.output()));
      if (std::min({state_branch.min_relu_margin(), action_branch.min_relu_margin(), head.min_relu_margin()}) >=
          kKinkMargin) {
        break;
      }
      if (++report.redraws > kMaxRedraws) throw std::runtime_error("gradient check: inputs keep landing on ReLU kinks");
    }
    const MatrixXd u = gaussian(rng, batch_size, 1);

    nn::Critic::Cache cache;
    const MatrixXd q = critic.forward(xs, xa, nn::Mode::Train, &cache, false);
    if ((q - head.output()).cwiseAbs().maxCoeff() > 1e-10) {
      throw std::runtime_error("gradient check: oracle forward disagrees with the critic");
    }
    nn::Gradients grads;
    critic.backward(cache, u, grads);

    const std::size_t s_norm = state_branch.has_norm() ? 2 : 0;
    const std::size_t a_norm = action_branch.has_norm() ? 2 : 0;
    const std::size_t a_offset = s_norm + 2 * state_branch.layers();
    const std::size_t h_offset = a_offset + a_norm + 2 * action_branch.layers();
    const Eigen::Index hs_width = state_branch.output().cols();

    check_norm(state_branch, grads, 0, h, report, [&](const OracleStack& edited) {
      return weighted_sum(head.evaluate(joined(edited.evaluate(xs), action_branch.output())), u);
    });
    check_dense(state_branch, grads, s_norm, h, report, [&](std::size_t, Eigen::Index col, const VectorXd& d) {
      return weighted_sum(head.output_with_column_delta(0, col, d), u);
    });
    check_norm(action_branch, grads, a_offset, h, report, [&](const OracleStack& edited) {
      return weighted_sum(head.evaluate(joined(state_branch.output(), edited.evaluate(xa))), u);
    });
    check_dense(action_branch, grads, a_offset + a_norm, h, report,
                [&](std::size_t, Eigen::Index col, const VectorXd& d) {
                  return weighted_sum(head.output_with_column_delta(0, hs_width + col, d), u);
                });
    check_dense(head, grads, h_offset, h, report, [&](std::size_t k, Eigen::Index col, const VectorXd& d) {
      return weighted_sum(head.output_with_column_delta(k, col, d), u);
    });
    ++report.batches;
  }
  return report;
}

}  // namespace aerostar::acceptance
