#pragma once

#include "aerostar/channel.hpp"
#include "aerostar/energy.hpp"
#include "aerostar/fairness.hpp"
#include "aerostar/link_budget.hpp"
#include "aerostar/numerics.hpp"
#include "aerostar/scenario.hpp"
#include "aerostar/star_surface.hpp"

#include <optional>
#include <vector>

namespace aerostar {

enum class DeploymentMode { Traj3d, Traj2d, AltitudeOnly, Stationary };
enum class RisType { StarCoupled, StarIndependent, DualTr, ReflectOnly };
enum class StationaryPower { Hover, None };

struct EnvConfig {
  WorldConfig world;
  ChannelParams channel;
  UavParams uav;
  double drag_coeff = 2.1;
  VPerpMode v_perp_mode = VPerpMode::NormalComponent;
  double bandwidth = 1e6;               // Hz
  double noise_density_dbm_hz = -95.0;
  std::optional<double> noise_power_dbm;  // overrides density * bandwidth
  double p_max_dbm = 29.0;
  PowerMode power_mode = PowerMode::Total;
  double r_qos = 2e5;  // bit/s
  RewardWeights reward;
  DeploymentMode deployment = DeploymentMode::Traj3d;
  RisType ris_type = RisType::StarCoupled;
  StationaryPower stationary_power = StationaryPower::None;

  double noise_power_w() const;
  double p_max_w() const;
  RisAeroParams ris_aero() const;
  void validate() const;
};

// Offsets into the flat state vector: UAV position (3), then interleaved
// (re, im) of H_bs_ris (row-major N x M), every h_bs_user, every h_ris_user.
struct StateLayout {
  Eigen::Index bs_antennas = 0;
  Eigen::Index ris_elements = 0;
  Eigen::Index users = 0;

  Eigen::Index position() const { return 0; }
  Eigen::Index bs_ris() const { return 3; }
  Eigen::Index bs_user(Eigen::Index j) const {
    return bs_ris() + 2 * bs_antennas * ris_elements + 2 * bs_antennas * j;
  }
  Eigen::Index ris_user(Eigen::Index j) const {
    return bs_user(users) + 2 * ris_elements * j;
  }
  Eigen::Index size() const { return ris_user(users); }
};

// Continuous block: [speed, elevation, azimuth, theta_r (N), beta_t (N),
// theta_t (N, independent-phase surfaces only), beamformer (2MJ)].
struct ActionLayout {
  Eigen::Index bs_antennas = 0;
  Eigen::Index ris_elements = 0;
  Eigen::Index users = 0;
  bool free_transmit_phase = false;

  Eigen::Index theta_r() const { return 3; }
  Eigen::Index beta_t() const { return 3 + ris_elements; }
  Eigen::Index theta_t() const { return 3 + 2 * ris_elements; }
  Eigen::Index beamformer() const { return 3 + (free_transmit_phase ? 3 : 2) * ris_elements; }
  Eigen::Index continuous_size() const { return beamformer() + 2 * bs_antennas * users; }
  // Independent-phase surfaces have no coupling signs to choose.
  Eigen::Index discrete_size() const { return free_transmit_phase ? 0 : ris_elements; }
};

struct HybridAction {
  Eigen::VectorXd continuous;  // raw, [-1, 1]
  Eigen::VectorXi discrete;    // +1 / -1 coupling signs

  // Critic input: continuous block followed by the signs as reals.
  Eigen::VectorXd joined() const;
};

struct DecodedContinuous {
  double speed = 0.0;
  double elevation = 0.0;
  double azimuth = 0.0;
  Eigen::VectorXd theta_r;
  Eigen::VectorXd beta_t;
  Eigen::VectorXd theta_t;  // empty unless the layout has a free transmit phase
  std::vector<double> beamformer_raw;
};

DecodedContinuous decode_continuous(const Eigen::VectorXd& raw, const ActionLayout& layout,
                                    double v_max);

// Threshold at zero (zero maps to -1); with probability epsilon an element is
// replaced by a uniform random sign.
Eigen::VectorXi decode_discrete(const Eigen::VectorXd& logits, double epsilon, Rng& rng);

int qos_violations(const Eigen::VectorXd& rates, double r_qos);

Eigen::VectorXd encode_state(const WorldState& world, const ChannelSet& channels,
                             const WorldConfig& config, double channel_scale);

struct StepInfo {
  Eigen::VectorXd rates;
  double sum_rate = 0.0;
  PowerBreakdown power;    // accounted power (zeroed for de-linked stationary runs)
  double efficiency = 0.0; // bit/J; hover power used when accounted power is zero
  double hfi = 0.0;
  double jfi = 0.0;
  int qos_violations = 0;
  Vec3 uav_pose = Vec3::Zero();
  bool coupling_ok = true;
};

struct StepOutcome {
  Eigen::VectorXd next_state;
  double reward = 0.0;
  bool terminal = false;
  StepInfo info;
};

class Environment {
 public:
  Environment(EnvConfig config, std::uint64_t seed);

  Eigen::VectorXd reset();
  StepOutcome step(const HybridAction& action);

  const EnvConfig& config() const { return config_; }
  const WorldState& world() const { return world_; }
  const ChannelSet& channels() const { return channels_; }
  const StateLayout& state_layout() const { return state_layout_; }
  const ActionLayout& action_layout() const { return action_layout_; }
  Eigen::Index state_dim() const { return state_layout_.size(); }
  Eigen::Index continuous_dim() const { return action_layout_.continuous_size(); }
  Eigen::Index discrete_dim() const { return action_layout_.discrete_size(); }
  double channel_scale() const { return channel_scale_; }
  bool terminated() const { return world_.step >= config_.world.episode_steps; }
  Eigen::VectorXd observe() const;

  // Surface matrices implied by a decoded action for this environment's surface type.
  CoupledTrc surface_response(const DecodedContinuous& decoded, const Eigen::VectorXi& signs) const;

 private:
  EnvConfig config_;
  StateLayout state_layout_;
  ActionLayout action_layout_;
  Rng placement_rng_;
  Rng mobility_rng_;
  Rng channel_rng_;
  double channel_scale_ = 1.0;
  WorldState world_;
  ChannelSet channels_;
  bool started_ = false;
};

}  // namespace aerostar
