#include "aerostar/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace aerostar {

namespace {

// Reflects a coordinate back into [lo, hi].
double bounce(double x, double lo, double hi) {
  if (hi <= lo) return lo;
  const double span = hi - lo;
  double r = std::fmod(x - lo, 2.0 * span);
  if (r < 0) r += 2.0 * span;
  return r <= span ? lo + r : hi - (r - span);
}

}  // namespace

void WorldConfig::validate() const {
  if (reflect_users < 0 || transmit_users < 0) {
    throw std::invalid_argument("user counts must be non-negative");
  }
  if (!(v_max >= 0.0)) throw std::invalid_argument("v_max must be non-negative");
  if (episode_steps < 1) throw std::invalid_argument("episode_steps must be >= 1");
  if (!(slot_duration > 0.0)) throw std::invalid_argument("slot_duration must be positive");
  if (!(min_altitude > 0.0) || !(max_altitude >= min_altitude)) {
    throw std::invalid_argument("altitude bounds must be positive and ordered");
  }
  if (!(user_speed >= 0.0)) throw std::invalid_argument("user_speed must be non-negative");
}

Vec3 panel_normal_toward(const Vec3& bs, const Vec3& uav) {
  Vec3 d = bs - uav;
  d.z() = 0.0;
  const double n = d.norm();
  if (n == 0.0) throw std::invalid_argument("BS directly below/above UAV: panel normal undefined");
  return d / n;
}

Side side_of(const WorldState& world, const Vec3& point) {
  const double s_user = (point - world.uav_pose).dot(world.panel_normal);
  const double s_bs = (world.bs_position - world.uav_pose).dot(world.panel_normal);
  if (s_user == 0.0) return Side::Reflect;
  return (s_user > 0.0) == (s_bs > 0.0) ? Side::Reflect : Side::Transmit;
}

WorldState init_world(const WorldConfig& config, Rng& rng) {
  config.validate();
  WorldState world;
  world.bs_position = config.bs_position;
  world.uav_pose = config.initial_uav_position;
  world.uav_pose.z() = std::clamp(world.uav_pose.z(), config.min_altitude, config.max_altitude);
  world.previous_uav_pose = world.uav_pose;
  world.panel_normal = panel_normal_toward(config.bs_position, world.uav_pose);
  world.step = 0;
  world.drift_heading = std::isnan(config.drift_heading)
                            ? rng.uniform(0.0, 2.0 * std::numbers::pi)
                            : config.drift_heading;

  const Eigen::Vector2d extent = config.area_max - config.area_min;
  const bool has_area = extent.x() > 0.0 && extent.y() > 0.0;
  if (config.user_count() > 0 && !has_area) {
    throw std::invalid_argument("init_world: user area has zero extent");
  }

  auto place = [&](Side wanted) {
    constexpr int kMaxTries = 10000;
    for (int attempt = 0; attempt < kMaxTries; ++attempt) {
      const Vec3 p(rng.uniform(config.area_min.x(), config.area_max.x()),
                   rng.uniform(config.area_min.y(), config.area_max.y()), config.user_height);
      if (side_of(world, p) == wanted) return p;
    }
    throw std::invalid_argument("init_world: no area on the requested side of the panel");
  };
  for (int i = 0; i < config.reflect_users; ++i) world.user_positions.push_back(place(Side::Reflect));
  for (int i = 0; i < config.transmit_users; ++i) world.user_positions.push_back(place(Side::Transmit));
  return world;
}

WorldState apply_uav_motion(WorldState world, const WorldConfig& config, double speed,
                            double elev, double azim) {
  const double dist = speed * config.slot_duration;
  const Vec3 dir(std::cos(elev) * std::cos(azim), std::cos(elev) * std::sin(azim), std::sin(elev));
  world.previous_uav_pose = world.uav_pose;
  world.uav_pose += dist * dir;
  world.uav_pose.z() = std::clamp(world.uav_pose.z(), config.min_altitude, config.max_altitude);
  return world;
}

WorldState step_users(WorldState world, const WorldConfig& config, Rng& rng) {
  const double len = config.user_speed * config.slot_duration;
  for (auto& p : world.user_positions) {
    double heading = 0.0;
    if (config.mobility == MobilityModel::RandomWalk) {
      heading = rng.uniform(0.0, 2.0 * std::numbers::pi);
    } else {
      heading = world.drift_heading + rng.uniform(-config.drift_jitter, config.drift_jitter);
    }
    if (len == 0.0) continue;
    p.x() = bounce(p.x() + len * std::cos(heading), config.area_min.x(), config.area_max.x());
    p.y() = bounce(p.y() + len * std::sin(heading), config.area_min.y(), config.area_max.y());
  }
  return world;
}

RegionSplit classify_regions(const WorldState& world) {
  RegionSplit split;
  for (int i = 0; i < static_cast<int>(world.user_positions.size()); ++i) {
    if (side_of(world, world.user_positions[static_cast<std::size_t>(i)]) == Side::Reflect) {
      split.reflect_ids.push_back(i);
    } else {
      split.transmit_ids.push_back(i);
    }
  }
  return split;
}

}  // namespace aerostar
