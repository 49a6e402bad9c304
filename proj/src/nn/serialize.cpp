#include "aerostar/nn/serialize.hpp"

#include <stdexcept>

namespace aerostar::nn {

using nlohmann::json;

namespace {

std::string activation_name(Activation a) {
  switch (a) {
    case Activation::Relu: return "relu";
    case Activation::Tanh: return "tanh";
    case Activation::Linear: return "linear";
  }
  return "linear";
}

Activation activation_from(const std::string& s) {
  if (s == "relu") return Activation::Relu;
  if (s == "tanh") return Activation::Tanh;
  if (s == "linear") return Activation::Linear;
  throw std::invalid_argument("unknown activation '" + s + "'");
}

json matrices(const std::vector<const Matrix*>& ms) {
  json out = json::array();
  for (const Matrix* m : ms) out.push_back(to_json(*m));
  return out;
}

std::vector<Matrix> matrices_from(const json& j) {
  std::vector<Matrix> out;
  for (const auto& e : j) out.push_back(matrix_from_json(e));
  return out;
}

}  // namespace

json to_json(const Matrix& m) {
  json data = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index k = 0; k < m.cols(); ++k) data.push_back(m(i, k));
  }
  return {{"rows", m.rows()}, {"cols", m.cols()}, {"data", std::move(data)}};
}

Matrix matrix_from_json(const json& j) {
  const auto rows = j.at("rows").get<Eigen::Index>();
  const auto cols = j.at("cols").get<Eigen::Index>();
  const auto& data = j.at("data");
  if (static_cast<Eigen::Index>(data.size()) != rows * cols) {
    throw std::invalid_argument("matrix_from_json: element count mismatch");
  }
  Matrix m(rows, cols);
  std::size_t k = 0;
  for (Eigen::Index i = 0; i < rows; ++i) {
    for (Eigen::Index c = 0; c < cols; ++c) m(i, c) = data[k++].get<double>();
  }
  return m;
}

json to_json(const MlpSpec& spec) {
  json acts = json::array();
  for (const auto a : spec.activations) acts.push_back(activation_name(a));
  const char* init = spec.output_init == OutputInit::FanIn          ? "fan_in"
                     : spec.output_init == OutputInit::SmallUniform ? "small_uniform"
                                                                    : "zero";
  return {{"widths", spec.widths},
          {"activations", acts},
          {"input_batch_norm", spec.input_batch_norm},
          {"output_init", init},
          {"output_init_range", spec.output_init_range},
          {"bn_momentum", spec.bn_momentum},
          {"bn_epsilon", spec.bn_epsilon}};
}

MlpSpec mlp_spec_from_json(const json& j) {
  MlpSpec spec;
  spec.widths = j.at("widths").get<std::vector<int>>();
  for (const auto& a : j.at("activations")) spec.activations.push_back(activation_from(a.get<std::string>()));
  spec.input_batch_norm = j.at("input_batch_norm").get<bool>();
  const auto init = j.at("output_init").get<std::string>();
  spec.output_init = init == "fan_in"          ? OutputInit::FanIn
                     : init == "small_uniform" ? OutputInit::SmallUniform
                                               : OutputInit::Zero;
  spec.output_init_range = j.at("output_init_range").get<double>();
  spec.bn_momentum = j.at("bn_momentum").get<double>();
  spec.bn_epsilon = j.at("bn_epsilon").get<double>();
  return spec;
}

json to_json(const Mlp& net) {
  return {{"spec", to_json(net.spec())},
          {"params", matrices(net.parameters())},
          {"buffers", matrices(net.buffers())}};
}

Mlp mlp_from_json(const json& j) {
  return Mlp::from_parts(mlp_spec_from_json(j.at("spec")), matrices_from(j.at("params")),
                         matrices_from(j.at("buffers")));
}

json to_json(const Critic& critic) {
  const CriticSpec& s = critic.spec();
  return {{"spec",
           {{"state_dim", s.state_dim},
            {"action_dim", s.action_dim},
            {"hidden", s.hidden},
            {"action_batch_norm", s.action_batch_norm}}},
          {"state_branch", to_json(critic.state_branch())},
          {"action_branch", to_json(critic.action_branch())},
          {"head", to_json(critic.head())}};
}

Critic critic_from_json(const json& j) {
  const auto& s = j.at("spec");
  CriticSpec spec{s.at("state_dim").get<int>(), s.at("action_dim").get<int>(), s.at("hidden").get<int>(),
                  s.at("action_batch_norm").get<bool>()};
  return Critic::from_parts(spec, mlp_from_json(j.at("state_branch")), mlp_from_json(j.at("action_branch")),
                            mlp_from_json(j.at("head")));
}

json to_json(const AdamState& state) {
  std::vector<const Matrix*> m;
  std::vector<const Matrix*> v;
  for (const auto& x : state.first_moment) m.push_back(&x);
  for (const auto& x : state.second_moment) v.push_back(&x);
  return {{"learning_rate", state.learning_rate},
          {"beta1", state.beta1},
          {"beta2", state.beta2},
          {"epsilon", state.epsilon},
          {"step", state.step},
          {"first_moment", matrices(m)},
          {"second_moment", matrices(v)}};
}

AdamState adam_from_json(const json& j) {
  AdamState s;
  s.learning_rate = j.at("learning_rate").get<double>();
  s.beta1 = j.at("beta1").get<double>();
  s.beta2 = j.at("beta2").get<double>();
  s.epsilon = j.at("epsilon").get<double>();
  s.step = j.at("step").get<long>();
  s.first_moment = matrices_from(j.at("first_moment"));
  s.second_moment = matrices_from(j.at("second_moment"));
  return s;
}

}  // namespace aerostar::nn
