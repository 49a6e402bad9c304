#pragma once

#include "aerostar/numerics.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <vector>

namespace aerostar::nn {

using Matrix = Eigen::MatrixXd;
using RowVector = Eigen::RowVectorXd;

enum class Activation { Relu, Tanh, Linear };
enum class Mode { Train, Eval };
enum class OutputInit { FanIn, SmallUniform, Zero };

// Parameter views used by the optimizer and target updates. Order is stable
// for a given network layout.
using ParamRefs = std::vector<Matrix*>;
using ConstParamRefs = std::vector<const Matrix*>;
using Gradients = std::vector<Matrix>;

struct MlpSpec {
  std::vector<int> widths;              // input width, then one width per dense layer
  std::vector<Activation> activations;  // one per dense layer
  bool input_batch_norm = true;
  OutputInit output_init = OutputInit::FanIn;
  double output_init_range = 3e-3;
  double bn_momentum = 0.99;
  double bn_epsilon = 1e-5;

  int input() const { return widths.front(); }
  int output() const { return widths.back(); }
  std::size_t layers() const { return activations.size(); }
  void validate() const;

  bool operator==(const MlpSpec&) const = default;
};

// Input batch-norm, then dense layers with per-layer activations. Batches are
// row-stacked: B x input in, B x output out.
class Mlp {
 public:
  struct Cache {
    std::uint64_t version = 0;
    Mode mode = Mode::Eval;
    Matrix bn_normalized;     // x_hat
    RowVector bn_inv_std;
    std::vector<Matrix> inputs;   // input to dense layer i
    std::vector<Matrix> outputs;  // activated output of dense layer i
  };

  Mlp() = default;
  Mlp(MlpSpec spec, Rng& rng);

  const MlpSpec& spec() const { return spec_; }

  // Train mode normalizes with batch statistics (B >= 2) and, when
  // update_stats is set, folds them into the running estimates.
  Matrix forward(const Matrix& x, Mode mode, Cache* cache = nullptr, bool update_stats = true);
  Matrix forward(const Matrix& x) const;  // eval mode, no cache

  // Fills `grads` (same order as parameters()) and returns dL/dx.
  Matrix backward(const Cache& cache, const Matrix& upstream, Gradients& grads) const;

  ParamRefs parameters();
  ConstParamRefs parameters() const;
  ParamRefs buffers();  // running mean / variance
  ConstParamRefs buffers() const;

  Matrix& weight(std::size_t layer) { return params_[weight_index(layer)]; }
  const Matrix& weight(std::size_t layer) const { return params_[weight_index(layer)]; }
  Matrix& bias(std::size_t layer) { return params_[weight_index(layer) + 1]; }
  const Matrix& bias(std::size_t layer) const { return params_[weight_index(layer) + 1]; }
  Matrix& bn_gamma() { return params_.at(0); }
  const Matrix& bn_gamma() const { return params_.at(0); }
  Matrix& bn_beta() { return params_.at(1); }
  const Matrix& bn_beta() const { return params_.at(1); }
  Matrix& running_mean() { return buffers_.at(0); }
  const Matrix& running_mean() const { return buffers_.at(0); }
  Matrix& running_var() { return buffers_.at(1); }
  const Matrix& running_var() const { return buffers_.at(1); }

  // Bumped by anything that edits parameters through this object; caches
  // from older versions are rejected by backward().
  std::uint64_t version() const { return version_; }
  void touch() { ++version_; }

  std::size_t parameter_count() const;

  // Rebuilds from serialized pieces; shapes are checked against the spec.
  static Mlp from_parts(MlpSpec spec, std::vector<Matrix> params, std::vector<Matrix> buffers);

 private:
  std::size_t weight_index(std::size_t layer) const {
    return (spec_.input_batch_norm ? 2 : 0) + 2 * layer;
  }
  Matrix forward_impl(const Matrix& x, Mode mode, Cache* cache, bool update_stats);

  MlpSpec spec_;
  std::vector<Matrix> params_;
  std::vector<Matrix> buffers_;
  std::uint64_t version_ = 1;
};

Matrix apply_activation(Activation act, const Matrix& z);

}  // namespace aerostar::nn
