#pragma once

#include "aerostar/nn/critic.hpp"
#include "aerostar/nn/mlp.hpp"
#include "aerostar/nn/optim.hpp"

#include <json.hpp>

namespace aerostar::nn {

// Checkpoint pieces. Doubles are written with round-trip precision, so a
// reload reproduces eval outputs bit-exactly.
nlohmann::json to_json(const Matrix& m);
Matrix matrix_from_json(const nlohmann::json& j);

nlohmann::json to_json(const MlpSpec& spec);
MlpSpec mlp_spec_from_json(const nlohmann::json& j);

nlohmann::json to_json(const Mlp& net);
Mlp mlp_from_json(const nlohmann::json& j);

nlohmann::json to_json(const Critic& critic);
Critic critic_from_json(const nlohmann::json& j);

nlohmann::json to_json(const AdamState& state);
AdamState adam_from_json(const nlohmann::json& j);

}  // namespace aerostar::nn
