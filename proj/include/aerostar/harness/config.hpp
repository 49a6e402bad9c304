#pragma once

#include "aerostar/agents/agent.hpp"
#include "aerostar/environment.hpp"

#include <json.hpp>

#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

namespace aerostar::harness {

// Raised for malformed, unknown or out-of-range configuration.
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct SweepConfig {
  std::vector<double> areas{0.0, 0.0081, 0.25, 1.0};  // m^2
  double velocity_max = 30.0;
  double velocity_step = 0.5;
  std::vector<int> elements{4, 16, 64, 256};
  std::vector<double> element_v_max{0.0, 5.0, 10.0};
  int element_episodes = 5;
  std::vector<double> cv_grid{0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 1.0};
  std::vector<int> fairness_users{2, 4, 8};
  int fairness_samples = 2000;
  std::vector<std::string> ablation_variants{"traj3d", "traj2d", "altitude_only", "stationary"};
};

struct ExperimentConfig {
  EnvConfig env;
  agents::AgentConfig agent;
  agents::AgentKind agent_kind = agents::AgentKind::DaDdpg;
  int episodes = 3000;
  std::vector<std::uint64_t> seeds{1};
  std::string output_dir;  // empty: derived from the output root and the verb
  bool log_steps = true;
  int threads = 0;  // 0: one worker per hardware thread
  std::string checkpoint;  // input for eval
  int eval_episodes = 10;
  SweepConfig sweep;

  // Throws ConfigError.
  void validate() const;
};

// Dotted "section.key" names, in serialization order.
std::vector<std::string> config_keys();

std::string get_value(const ExperimentConfig& config, const std::string& key);
// Throws ConfigError for unknown keys or unparsable values.
void set_value(ExperimentConfig& config, const std::string& key, const std::string& value);

// INI text with one section per module.
std::string serialize(const ExperimentConfig& config);
// Overlays the file's keys onto `base`; unknown sections or keys are errors.
ExperimentConfig parse_config(const std::string& text, ExperimentConfig base = {});
ExperimentConfig load_config(const std::filesystem::path& path, ExperimentConfig base = {});

nlohmann::json to_json(const ExperimentConfig& config);

bool operator==(const ExperimentConfig& a, const ExperimentConfig& b);

// Known ablation variant names.
const std::vector<std::string>& ablation_variant_names();

// Environment variable naming the root under which runs are written.
inline constexpr const char* kOutputRootEnv = "AEROSTAR_OUTPUT_ROOT";
std::filesystem::path output_root();

// Shortest text that parses back to the same double.
std::string format_double(double x);

}  // namespace aerostar::harness
