#pragma once

#include "aerostar/harness/config.hpp"

#include <json.hpp>

#include <filesystem>
#include <string>
#include <vector>

namespace aerostar::harness {

struct SeedSummary {
  std::uint64_t seed = 0;
  std::vector<double> episode_returns;
  double first50_mean = 0.0;
  double last50_mean = 0.0;
  double mean_efficiency = 0.0;          // over the last 50 episodes
  double mean_qos_violation_rate = 0.0;  // over the last 50 episodes
  std::filesystem::path metrics_csv;
  std::filesystem::path checkpoint;  // empty for the random agent
};

struct TrainingResult {
  std::vector<SeedSummary> seeds;
  double last50_mean = 0.0;
  double last50_std = 0.0;
  std::filesystem::path summary_json;
};

// Output directory for a verb: the config's output_dir, else <root>/<verb>.
std::filesystem::path resolve_output_dir(const ExperimentConfig& config, const std::string& verb);

// Trains one agent per seed (seeds run on worker threads). Writes
// <agent>_seed<k>.csv, <agent>_seed<k>.ckpt.json and summary.json under out_dir.
TrainingResult run_training(const ExperimentConfig& config, const std::filesystem::path& out_dir);
SeedSummary train_seed(const ExperimentConfig& config, std::uint64_t seed, const std::filesystem::path& out_dir);

struct VelocityAreaRow {
  double area = 0.0;
  double velocity = 0.0;
  double total_power = 0.0;
  bool argmin = false;
};

// Level-flight power over sweep.areas x [0, velocity_max] in velocity_step
// increments; the lowest-power velocity of each area is flagged.
std::vector<VelocityAreaRow> run_velocity_area_sweep(const ExperimentConfig& config,
                                                     const std::filesystem::path& out_dir);

struct ElementsRow {
  int elements = 0;
  double v_max = 0.0;
  double mean_efficiency = 0.0;
  double mean_sum_rate = 0.0;
  double mean_power = 0.0;
  double mean_ris_drag = 0.0;
};

// Fixed heuristic policy: fly at up to V_max toward the user centroid, random
// feasible surface coefficients, matched-filter beamformer.
std::vector<ElementsRow> run_elements_sweep(const ExperimentConfig& config, const std::filesystem::path& out_dir);

struct FairnessRow {
  double cv = 0.0;
  int users = 0;
  double mean_hfi = 0.0;
  double mean_jfi = 0.0;
};

// Lognormal rate vectors whose coefficient of variation equals each grid value.
std::vector<FairnessRow> run_fairness_sweep(const ExperimentConfig& config, const std::filesystem::path& out_dir);

struct AblationRow {
  std::string variant;
  std::uint64_t seed = 0;
  double last50_mean = 0.0;
  double mean_efficiency = 0.0;
  double mean_qos_violation_rate = 0.0;
};

// Applies a named variant to a config. Throws ConfigError for unknown names.
ExperimentConfig apply_variant(ExperimentConfig config, const std::string& variant);

// run_training per variant under out_dir/<variant>, shared seeds.
std::vector<AblationRow> run_ablation(const ExperimentConfig& config, const std::filesystem::path& out_dir);

struct EvalResult {
  std::vector<double> episode_returns;
  double mean_return = 0.0;
  double mean_efficiency = 0.0;
  std::filesystem::path metrics_csv;
};

// Restores config.checkpoint and runs greedy episodes without learning.
EvalResult run_eval(const ExperimentConfig& config, const std::filesystem::path& out_dir);

// Checkpoint file: agent kind, config echo and agent state.
void save_checkpoint(const std::filesystem::path& path, const ExperimentConfig& config,
                     const agents::Agent& agent);
nlohmann::json read_json(const std::filesystem::path& path);
void write_json(const std::filesystem::path& path, const nlohmann::json& j);

}  // namespace aerostar::harness
