#include "aerostar/nn/mlp.hpp"

#include <cmath>
#include <stdexcept>

namespace aerostar::nn {

namespace {

Matrix uniform_matrix(Eigen::Index rows, Eigen::Index cols, double range, Rng& rng) {
  Matrix m(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i) {
    for (Eigen::Index j = 0; j < cols; ++j) m(i, j) = rng.uniform(-range, range);
  }
  return m;
}

// dL/dz given dL/da and the activated output a.
Matrix activation_backward(Activation act, const Matrix& upstream, const Matrix& activated) {
  switch (act) {
    case Activation::Relu:
      return (activated.array() > 0.0).select(upstream, 0.0);
    case Activation::Tanh:
      return upstream.array() * (1.0 - activated.array().square());
    case Activation::Linear:
      return upstream;
  }
  throw std::logic_error("unknown activation");
}

}  // namespace

Matrix apply_activation(Activation act, const Matrix& z) {
  switch (act) {
    case Activation::Relu:
      return z.cwiseMax(0.0);
    case Activation::Tanh:
      return z.array().tanh().matrix();
    case Activation::Linear:
      return z;
  }
  throw std::logic_error("unknown activation");
}

void MlpSpec::validate() const {
  if (widths.size() < 2) throw std::invalid_argument("MlpSpec: need an input width and at least one layer");
  if (activations.size() + 1 != widths.size()) {
    throw std::invalid_argument("MlpSpec: one activation per dense layer");
  }
  for (const int w : widths) {
    if (w < 1) throw std::invalid_argument("MlpSpec: widths must be positive");
  }
  if (!(bn_momentum >= 0.0 && bn_momentum < 1.0) || !(bn_epsilon > 0.0)) {
    throw std::invalid_argument("MlpSpec: invalid batch-norm constants");
  }
}

Mlp::Mlp(MlpSpec spec, Rng& rng) : spec_(std::move(spec)) {
  spec_.validate();
  const int in = spec_.input();
  if (spec_.input_batch_norm) {
    params_.push_back(Matrix::Ones(1, in));
    params_.push_back(Matrix::Zero(1, in));
    buffers_.push_back(Matrix::Zero(1, in));
    buffers_.push_back(Matrix::Ones(1, in));
  }
  for (std::size_t l = 0; l < spec_.layers(); ++l) {
    const int fan_in = spec_.widths[l];
    const int fan_out = spec_.widths[l + 1];
    const bool last = l + 1 == spec_.layers();
    double range = 1.0 / std::sqrt(static_cast<double>(fan_in));
    if (last && spec_.output_init == OutputInit::SmallUniform) range = spec_.output_init_range;
    if (last && spec_.output_init == OutputInit::Zero) {
      params_.push_back(Matrix::Zero(fan_in, fan_out));
      params_.push_back(Matrix::Zero(1, fan_out));
    } else {
      params_.push_back(uniform_matrix(fan_in, fan_out, range, rng));
      params_.push_back(uniform_matrix(1, fan_out, range, rng));
    }
  }
}

Mlp Mlp::from_parts(MlpSpec spec, std::vector<Matrix> params, std::vector<Matrix> buffers) {
  spec.validate();
  Mlp net;
  net.spec_ = std::move(spec);
  const std::size_t bn = net.spec_.input_batch_norm ? 2 : 0;
  if (params.size() != bn + 2 * net.spec_.layers() || buffers.size() != bn) {
    throw std::invalid_argument("Mlp::from_parts: tensor count does not match spec");
  }
  const int in = net.spec_.input();
  for (std::size_t i = 0; i < bn; ++i) {
    if (params[i].rows() != 1 || params[i].cols() != in || buffers[i].rows() != 1 ||
        buffers[i].cols() != in) {
      throw std::invalid_argument("Mlp::from_parts: batch-norm shape mismatch");
    }
  }
  for (std::size_t l = 0; l < net.spec_.layers(); ++l) {
    const Matrix& w = params[bn + 2 * l];
    const Matrix& b = params[bn + 2 * l + 1];
    if (w.rows() != net.spec_.widths[l] || w.cols() != net.spec_.widths[l + 1] || b.rows() != 1 ||
        b.cols() != net.spec_.widths[l + 1]) {
      throw std::invalid_argument("Mlp::from_parts: dense shape mismatch");
    }
  }
  net.params_ = std::move(params);
  net.buffers_ = std::move(buffers);
  return net;
}

Matrix Mlp::forward(const Matrix& x, Mode mode, Cache* cache, bool update_stats) {
  return forward_impl(x, mode, cache, update_stats);
}

Matrix Mlp::forward(const Matrix& x) const {
  if (x.cols() != spec_.input()) throw std::invalid_argument("Mlp::forward: input width mismatch");
  Matrix a = x;
  if (spec_.input_batch_norm) {
    const RowVector inv_std =
        (running_var().array() + spec_.bn_epsilon).rsqrt().matrix();
    a = ((a.rowwise() - running_mean().row(0)).array().rowwise() *
         (inv_std.array() * bn_gamma().row(0).array()))
            .rowwise() +
        bn_beta().row(0).array();
  }
  for (std::size_t l = 0; l < spec_.layers(); ++l) {
    Matrix z = a * weight(l);
    z.rowwise() += bias(l).row(0);
    a = apply_activation(spec_.activations[l], z);
  }
  return a;
}

Matrix Mlp::forward_impl(const Matrix& x, Mode mode, Cache* cache, bool update_stats) {
  if (x.cols() != spec_.input()) throw std::invalid_argument("Mlp::forward: input width mismatch");
  if (mode == Mode::Train && spec_.input_batch_norm && x.rows() < 2) {
    throw std::invalid_argument("Mlp::forward: train-mode batch norm needs at least 2 rows");
  }
  Matrix a = x;
  if (spec_.input_batch_norm) {
    RowVector mean;
    RowVector var;
    if (mode == Mode::Train) {
      mean = x.colwise().mean();
      var = (x.rowwise() - mean).array().square().colwise().mean().matrix();
      if (update_stats) {
        const double m = spec_.bn_momentum;
        running_mean() = m * running_mean() + (1.0 - m) * mean;
        running_var() = m * running_var() + (1.0 - m) * var;
      }
    } else {
      mean = running_mean().row(0);
      var = running_var().row(0);
    }
    const RowVector inv_std = (var.array() + spec_.bn_epsilon).rsqrt().matrix();
    Matrix normalized = (x.rowwise() - mean).array().rowwise() * inv_std.array();
    a = (normalized.array().rowwise() * bn_gamma().row(0).array()).rowwise() +
        bn_beta().row(0).array();
    if (cache) {
      cache->bn_normalized = std::move(normalized);
      cache->bn_inv_std = inv_std;
    }
  }
  if (cache) {
    cache->version = version_;
    cache->mode = mode;
    cache->inputs.resize(spec_.layers());
    cache->outputs.resize(spec_.layers());
  }
  for (std::size_t l = 0; l < spec_.layers(); ++l) {
    Matrix z = a * weight(l);
    z.rowwise() += bias(l).row(0);
    Matrix out = apply_activation(spec_.activations[l], z);
    if (cache) {
      cache->inputs[l] = std::move(a);
      cache->outputs[l] = out;
    }
    a = std::move(out);
  }
  return a;
}

Matrix Mlp::backward(const Cache& cache, const Matrix& upstream, Gradients& grads) const {
  if (cache.version != version_ || cache.inputs.size() != spec_.layers()) {
    throw std::logic_error("Mlp::backward: stale or foreign cache");
  }
  if (upstream.cols() != spec_.output() || upstream.rows() != cache.outputs.back().rows()) {
    throw std::invalid_argument("Mlp::backward: upstream gradient shape mismatch");
  }
  grads.resize(params_.size());
  Matrix delta = upstream;
  for (std::size_t l = spec_.layers(); l-- > 0;) {
    const Matrix dz = activation_backward(spec_.activations[l], delta, cache.outputs[l]);
    const std::size_t wi = weight_index(l);
    grads[wi].noalias() = cache.inputs[l].transpose() * dz;
    grads[wi + 1] = dz.colwise().sum();
    delta.noalias() = dz * weight(l).transpose();
  }
  if (!spec_.input_batch_norm) return delta;

  const Matrix& xhat = cache.bn_normalized;
  grads[0] = (delta.array() * xhat.array()).colwise().sum();
  grads[1] = delta.colwise().sum();
  const Matrix dxhat = delta.array().rowwise() * bn_gamma().row(0).array();
  if (cache.mode == Mode::Eval) {
    return dxhat.array().rowwise() * cache.bn_inv_std.array();
  }
  const double b = static_cast<double>(delta.rows());
  const RowVector sum_dxhat = dxhat.colwise().sum();
  const RowVector sum_dxhat_xhat = (dxhat.array() * xhat.array()).colwise().sum();
  Matrix dx = (b * dxhat.array()).matrix();
  dx.rowwise() -= sum_dxhat;
  dx -= (xhat.array().rowwise() * sum_dxhat_xhat.array()).matrix();
  return (dx.array().rowwise() * (cache.bn_inv_std.array() / b)).matrix();
}

ParamRefs Mlp::parameters() {
  ParamRefs out;
  for (auto& p : params_) out.push_back(&p);
  return out;
}

ConstParamRefs Mlp::parameters() const {
  ConstParamRefs out;
  for (const auto& p : params_) out.push_back(&p);
  return out;
}

ParamRefs Mlp::buffers() {
  ParamRefs out;
  for (auto& p : buffers_) out.push_back(&p);
  return out;
}

ConstParamRefs Mlp::buffers() const {
  ConstParamRefs out;
  for (const auto& p : buffers_) out.push_back(&p);
  return out;
}

std::size_t Mlp::parameter_count() const {
  std::size_t n = 0;
  for (const auto& p : params_) n += static_cast<std::size_t>(p.size());
  return n;
}

}  // namespace aerostar::nn
