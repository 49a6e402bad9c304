#pragma once

#include "aerostar/numerics.hpp"

#include <limits>
#include <vector>

namespace aerostar {

enum class MobilityModel { RandomWalk, Directional };

struct WorldConfig {
  Vec3 bs_position{0.0, 0.0, 25.0};
  Vec3 initial_uav_position{1000.0, 0.0, 30.0};
  int reflect_users = 2;   // P, placed on the BS side of the panel
  int transmit_users = 2;  // Q
  double user_speed = 1.0;    // m/s
  double user_height = 1.5;   // m
  MobilityModel mobility = MobilityModel::RandomWalk;
  // Heading of the directional drift (rad, from +x). NaN draws one per episode.
  double drift_heading = std::numeric_limits<double>::quiet_NaN();
  double drift_jitter = 0.3926990816987241;  // pi/8, uniform half-width
  // Horizontal box in which users live, meters.
  Eigen::Vector2d area_min{900.0, -50.0};
  Eigen::Vector2d area_max{1100.0, 50.0};
  int episode_steps = 30;
  double slot_duration = 1.0;  // s
  double v_max = 10.0;         // m/s
  double min_altitude = 20.0;
  double max_altitude = 150.0;

  int user_count() const { return reflect_users + transmit_users; }
  // Throws std::invalid_argument when an invariant is broken.
  void validate() const;
};

struct WorldState {
  Vec3 bs_position = Vec3::Zero();
  Vec3 uav_pose = Vec3::Zero();
  Vec3 previous_uav_pose = Vec3::Zero();
  std::vector<Vec3> user_positions;
  Vec3 panel_normal = Vec3::UnitX();
  double drift_heading = 0.0;
  int step = 0;

  // Velocity implied by the last motion.
  Vec3 uav_velocity(double slot_duration) const {
    return (uav_pose - previous_uav_pose) / slot_duration;
  }
};

enum class Side { Reflect, Transmit };

struct RegionSplit {
  std::vector<int> reflect_ids;
  std::vector<int> transmit_ids;
};

// Horizontal unit vector from the UAV toward the BS.
Vec3 panel_normal_toward(const Vec3& bs, const Vec3& uav);

WorldState init_world(const WorldConfig& config, Rng& rng);

// Moves the UAV by speed*slot_duration along (elev, azim); altitude is
// clamped to the configured bounds.
WorldState apply_uav_motion(WorldState world, const WorldConfig& config, double speed,
                            double elev, double azim);

WorldState step_users(WorldState world, const WorldConfig& config, Rng& rng);

// Side of the panel plane (through the UAV, normal panel_normal) on which
// `point` lies; points on the plane count as reflect side.
Side side_of(const WorldState& world, const Vec3& point);

RegionSplit classify_regions(const WorldState& world);

}  // namespace aerostar
