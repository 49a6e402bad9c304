#include "aerostar/environment.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace aerostar {

namespace {

constexpr double kPi = std::numbers::pi;

double clamp_unit(double x) { return std::clamp(x, -1.0, 1.0); }

void put_complex(Eigen::VectorXd& out, Eigen::Index& k, Complex z, double scale) {
  out(k++) = z.real() * scale;
  out(k++) = z.imag() * scale;
}

}  // namespace

double EnvConfig::noise_power_w() const {
  if (noise_power_dbm) return dbm_to_watts(*noise_power_dbm);
  return dbm_to_watts(noise_density_dbm_hz + 10.0 * std::log10(bandwidth));
}

double EnvConfig::p_max_w() const { return dbm_to_watts(p_max_dbm); }

RisAeroParams EnvConfig::ris_aero() const {
  RisAeroParams ris;
  ris.row_length = channel.row_length();
  ris.wavelength = channel.wavelength();
  ris.mu = channel.spacing_divisor;
  ris.drag_coeff = drag_coeff;
  ris.v_perp_mode = v_perp_mode;
  return ris;
}

void EnvConfig::validate() const {
  world.validate();
  channel.validate();
  if (!(bandwidth > 0.0)) throw std::invalid_argument("bandwidth must be positive");
  if (!(r_qos >= 0.0)) throw std::invalid_argument("r_qos must be non-negative");
  if (reward.alpha < 0.0 || reward.beta < 0.0) throw std::invalid_argument("reward weights must be non-negative");
  if (ris_type == RisType::DualTr && channel.ris_elements % 2 != 0) {
    throw std::invalid_argument("dual_tr surface needs an even element count");
  }
}

Eigen::VectorXd HybridAction::joined() const {
  Eigen::VectorXd out(continuous.size() + discrete.size());
  out << continuous, discrete.cast<double>();
  return out;
}

DecodedContinuous decode_continuous(const Eigen::VectorXd& raw, const ActionLayout& layout,
                                    double v_max) {
  if (raw.size() != layout.continuous_size()) {
    throw std::invalid_argument("decode_continuous: action length mismatch");
  }
  const Eigen::VectorXd x = raw.unaryExpr(&clamp_unit);
  const Eigen::Index n = layout.ris_elements;
  DecodedContinuous out;
  out.speed = (x(0) + 1.0) / 2.0 * v_max;
  out.elevation = x(1) * kPi / 2.0;
  out.azimuth = (x(2) + 1.0) * kPi;
  if (out.azimuth >= 2.0 * kPi) out.azimuth -= 2.0 * kPi;
  out.theta_r = (x.segment(layout.theta_r(), n) * kPi).unaryExpr(&wrap_phase);
  out.beta_t = (x.segment(layout.beta_t(), n).array() + 1.0) / 2.0;
  if (layout.free_transmit_phase) {
    out.theta_t = (x.segment(layout.theta_t(), n) * kPi).unaryExpr(&wrap_phase);
  }
  const Eigen::Index nb = 2 * layout.bs_antennas * layout.users;
  out.beamformer_raw.assign(x.data() + layout.beamformer(), x.data() + layout.beamformer() + nb);
  return out;
}

Eigen::VectorXi decode_discrete(const Eigen::VectorXd& logits, double epsilon, Rng& rng) {
  if (!(epsilon >= 0.0 && epsilon <= 1.0)) throw std::invalid_argument("decode_discrete: epsilon outside [0, 1]");
  Eigen::VectorXi out(logits.size());
  for (Eigen::Index i = 0; i < logits.size(); ++i) {
    if (epsilon > 0.0 && rng.bernoulli(epsilon)) {
      out(i) = rng.bernoulli(0.5) ? 1 : -1;
    } else {
      out(i) = logits(i) > 0.0 ? 1 : -1;
    }
  }
  return out;
}

int qos_violations(const Eigen::VectorXd& rates, double r_qos) {
  return static_cast<int>((rates.array() < r_qos).count());
}

Eigen::VectorXd encode_state(const WorldState& world, const ChannelSet& channels,
                             const WorldConfig& config, double channel_scale) {
  const Eigen::Index m = channels.bs_ris.cols();
  const Eigen::Index n = channels.bs_ris.rows();
  const Eigen::Index users = channels.users();
  const StateLayout layout{m, n, users};
  Eigen::VectorXd s(layout.size());

  const Eigen::Vector2d center = (config.area_min + config.area_max) / 2.0;
  const Eigen::Vector2d half = ((config.area_max - config.area_min) / 2.0).cwiseMax(1.0);
  const double alt_mid = (config.min_altitude + config.max_altitude) / 2.0;
  const double alt_half = std::max((config.max_altitude - config.min_altitude) / 2.0, 1.0);
  s(0) = (world.uav_pose.x() - center.x()) / half.x();
  s(1) = (world.uav_pose.y() - center.y()) / half.y();
  s(2) = (world.uav_pose.z() - alt_mid) / alt_half;

  Eigen::Index k = layout.bs_ris();
  for (Eigen::Index r = 0; r < n; ++r) {
    for (Eigen::Index c = 0; c < m; ++c) put_complex(s, k, channels.bs_ris(r, c), channel_scale);
  }
  for (Eigen::Index j = 0; j < users; ++j) {
    if (channels.bs_user[static_cast<std::size_t>(j)].size() != m) {
      throw std::invalid_argument("encode_state: BS-user channel length mismatch");
    }
    for (Eigen::Index a = 0; a < m; ++a) put_complex(s, k, channels.bs_user[static_cast<std::size_t>(j)](a), channel_scale);
  }
  for (Eigen::Index j = 0; j < users; ++j) {
    if (channels.ris_user[static_cast<std::size_t>(j)].size() != n) {
      throw std::invalid_argument("encode_state: RIS-user channel length mismatch");
    }
    for (Eigen::Index e = 0; e < n; ++e) put_complex(s, k, channels.ris_user[static_cast<std::size_t>(j)](e), channel_scale);
  }
  return s;
}

Environment::Environment(EnvConfig config, std::uint64_t seed)
    : config_(std::move(config)),
      placement_rng_(derive_seed(seed, "env.placement")),
      mobility_rng_(derive_seed(seed, "env.mobility")),
      channel_rng_(derive_seed(seed, "env.channel")) {
  config_.validate();
  const Eigen::Index m = config_.channel.bs_antennas;
  const Eigen::Index n = config_.channel.ris_elements;
  const Eigen::Index users = config_.world.user_count();
  state_layout_ = StateLayout{m, n, users};
  action_layout_ = ActionLayout{m, n, users, config_.ris_type == RisType::StarIndependent};

  const double d0 = (config_.world.initial_uav_position - config_.world.bs_position).norm();
  channel_scale_ = 1.0 / std::sqrt(db_to_linear_gain(path_loss_los_db(config_.channel.carrier_ghz, d0)));
}

Eigen::VectorXd Environment::observe() const {
  return encode_state(world_, channels_, config_.world, channel_scale_);
}

Eigen::VectorXd Environment::reset() {
  world_ = init_world(config_.world, placement_rng_);
  channels_ = build_channel_set(world_, config_.channel, channel_rng_);
  started_ = true;
  return observe();
}

CoupledTrc Environment::surface_response(const DecodedContinuous& decoded,
                                         const Eigen::VectorXi& signs) const {
  const Eigen::Index n = config_.channel.ris_elements;
  TrcConfig trc{decoded.theta_r, decoded.beta_t, signs};
  switch (config_.ris_type) {
    case RisType::StarCoupled:
      return derive_coupled_config(trc);
    case RisType::StarIndependent: {
      CVector reflect(n);
      CVector transmit(n);
      for (Eigen::Index i = 0; i < n; ++i) {
        const double bt = decoded.beta_t(i);
        reflect(i) = std::polar(std::sqrt(1.0 - bt * bt), decoded.theta_r(i));
        transmit(i) = std::polar(bt, decoded.theta_t(i));
      }
      return {DiagonalC(reflect), DiagonalC(transmit)};
    }
    case RisType::DualTr:
      trc.beta_t.head(n / 2).setZero();
      trc.beta_t.tail(n - n / 2).setOnes();
      return derive_coupled_config(trc);
    case RisType::ReflectOnly:
      trc.beta_t.setZero();
      return derive_coupled_config(trc);
  }
  throw std::logic_error("unknown surface type");
}

StepOutcome Environment::step(const HybridAction& action) {
  if (!started_) throw std::logic_error("Environment::step called before reset");
  if (terminated()) throw std::logic_error("Environment::step called on a terminated episode");
  if (action.continuous.size() != continuous_dim() || action.discrete.size() != discrete_dim()) {
    throw std::invalid_argument("Environment::step: action length mismatch");
  }
  const WorldConfig& wc = config_.world;
  DecodedContinuous decoded = decode_continuous(action.continuous, action_layout_, wc.v_max);

  // Surface and beamformer act on the channels observed this slot.
  const CoupledTrc surface = surface_response(decoded, action.discrete);
  StepInfo info;
  info.coupling_ok = config_.ris_type == RisType::StarIndependent ||
                     validate_coupling(surface.reflect, surface.transmit);
  if (!info.coupling_ok) throw std::logic_error("applied surface violates the coupling constraint");

  const Beamformer bf = project_beamformer(decoded.beamformer_raw, config_.channel.bs_antennas,
                                           wc.user_count(), config_.p_max_w(), config_.power_mode);
  const auto users = static_cast<Eigen::Index>(channels_.users());
  CMatrix effective(users, config_.channel.bs_antennas);
  for (Eigen::Index j = 0; j < users; ++j) {
    const auto ju = static_cast<std::size_t>(j);
    const DiagonalC& phi = channels_.side[ju] == Side::Reflect ? surface.reflect : surface.transmit;
    effective.row(j) = effective_channel(channels_.bs_user[ju], channels_.ris_user[ju], phi, channels_.bs_ris);
  }
  const LinkReport link = users > 0 ? rates(effective, bf.v, config_.noise_power_w(), config_.bandwidth)
                                    : LinkReport{};

  // Motion for the next slot.
  switch (config_.deployment) {
    case DeploymentMode::Traj3d:
      break;
    case DeploymentMode::Traj2d:
      decoded.elevation = 0.0;
      break;
    case DeploymentMode::AltitudeOnly: {
      const double climb = std::sin(decoded.elevation);
      decoded.speed *= std::abs(climb);
      decoded.elevation = climb >= 0.0 ? kPi / 2.0 : -kPi / 2.0;
      break;
    }
    case DeploymentMode::Stationary:
      decoded.speed = 0.0;
      break;
  }
  world_ = apply_uav_motion(std::move(world_), wc, decoded.speed, decoded.elevation, decoded.azimuth);
  const Vec3 velocity = world_.uav_velocity(wc.slot_duration);
  const PowerBreakdown hover = propulsion_power(config_.uav, 0.0, 0.0);
  if (config_.deployment == DeploymentMode::Stationary) {
    info.power = config_.stationary_power == StationaryPower::Hover ? hover : PowerBreakdown{};
  } else {
    info.power = total_power(config_.uav, config_.ris_aero(), velocity, world_.panel_normal);
  }

  world_ = step_users(std::move(world_), wc, mobility_rng_);
  world_.step += 1;
  channels_ = build_channel_set(world_, config_.channel, channel_rng_);

  info.rates = link.rate;
  info.sum_rate = link.sum_rate;
  info.efficiency = efficiency(info.sum_rate, info.power.total > 0.0 ? info.power.total : hover.total);
  const FairnessReport fair = users > 0 ? fairness_report(link.rate) : FairnessReport{};
  info.hfi = fair.hfi;
  info.jfi = fair.jfi;
  info.qos_violations = users > 0 ? qos_violations(link.rate, config_.r_qos) : 0;
  info.uav_pose = world_.uav_pose;

  StepOutcome out;
  out.reward = users > 0 ? reward(link.rate, info.power.total, config_.reward)
                         : -config_.reward.beta * info.power.total;
  out.terminal = terminated();
  out.next_state = observe();
  out.info = std::move(info);
  return out;
}

}  // namespace aerostar
