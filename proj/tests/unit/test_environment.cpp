#include "aerostar/environment.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

namespace aerostar {
namespace {

constexpr double kPi = std::numbers::pi;

EnvConfig tiny_config() {
  EnvConfig config;
  config.channel.bs_antennas = 2;
  config.channel.ris_elements = 4;
  config.world.reflect_users = 1;
  config.world.transmit_users = 1;
  return config;
}

HybridAction hover_action(const Environment& env) {
  HybridAction a;
  a.continuous = Eigen::VectorXd::Zero(env.continuous_dim());
  a.continuous(0) = -1.0;
  a.discrete = Eigen::VectorXi::Ones(env.discrete_dim());
  return a;
}

HybridAction random_action(const Environment& env, Rng& rng) {
  HybridAction a;
  a.continuous = Eigen::VectorXd::NullaryExpr(env.continuous_dim(), [&] { return rng.uniform(-1.0, 1.0); });
  a.discrete = Eigen::VectorXi::NullaryExpr(env.discrete_dim(), [&] { return rng.bernoulli(0.5) ? 1 : -1; });
  return a;
}

TEST(Layouts, StateAndActionSizes) {
  EXPECT_EQ((StateLayout{4, 16, 4}.size()), 291);
  EXPECT_EQ((StateLayout{2, 4, 2}.size()), 43);
  const ActionLayout coupled{4, 16, 4, false};
  EXPECT_EQ(coupled.continuous_size(), 3 + 32 + 32);
  EXPECT_EQ(coupled.discrete_size(), 16);
  EXPECT_EQ(coupled.continuous_size() + coupled.discrete_size(), 83);
  const ActionLayout independent{4, 16, 4, true};
  EXPECT_EQ(independent.continuous_size(), 3 + 48 + 32);
  EXPECT_EQ(independent.discrete_size(), 0);
}

TEST(DecodeContinuous, MidpointMapping) {
  const ActionLayout layout{2, 4, 2, false};
  const DecodedContinuous d = decode_continuous(Eigen::VectorXd::Zero(layout.continuous_size()), layout, 10.0);
  EXPECT_DOUBLE_EQ(d.speed, 5.0);
  EXPECT_DOUBLE_EQ(d.elevation, 0.0);
  EXPECT_DOUBLE_EQ(d.azimuth, kPi);
  EXPECT_EQ(d.theta_r, Eigen::VectorXd::Zero(4));
  EXPECT_EQ(d.beta_t, Eigen::VectorXd::Constant(4, 0.5));
  EXPECT_EQ(d.beamformer_raw.size(), 8u);
}

TEST(DecodeContinuous, BoundariesAndClamping) {
  const ActionLayout layout{2, 4, 2, false};
  Eigen::VectorXd raw = Eigen::VectorXd::Zero(layout.continuous_size());
  raw(0) = 1.0;
  raw(1) = 7.0;  // clamped to 1
  raw.segment(layout.beta_t(), 4).setConstant(-1.0);
  raw(layout.theta_r()) = -1.0;
  const DecodedContinuous d = decode_continuous(raw, layout, 10.0);
  EXPECT_DOUBLE_EQ(d.speed, 10.0);
  EXPECT_DOUBLE_EQ(d.elevation, kPi / 2.0);
  EXPECT_EQ(d.beta_t, Eigen::VectorXd::Zero(4));
  EXPECT_DOUBLE_EQ(d.theta_r(0), kPi);  // -pi wraps into (-pi, pi]
  raw(2) = 1.0;
  EXPECT_LT(decode_continuous(raw, layout, 10.0).azimuth, 2.0 * kPi);
  EXPECT_THROW(decode_continuous(Eigen::VectorXd::Zero(3), layout, 10.0), std::invalid_argument);
}

TEST(DecodeDiscrete, ThresholdAtZero) {
  Rng rng(1);
  const Eigen::VectorXi s = decode_discrete(Eigen::Vector3d(0.3, -0.2, 0.0), 0.0, rng);
  EXPECT_EQ(s, Eigen::Vector3i(1, -1, -1));
  EXPECT_EQ(decode_discrete(Eigen::Vector3d(0.3, -0.2, 0.0), 0.0, rng), s);
  EXPECT_THROW(decode_discrete(Eigen::Vector3d::Zero(), 1.5, rng), std::invalid_argument);
}

TEST(DecodeDiscrete, FullExplorationIsFair) {
  Rng rng(2);
  const Eigen::VectorXd logits = Eigen::VectorXd::Constant(10000, 5.0);
  const Eigen::VectorXi s = decode_discrete(logits, 1.0, rng);
  const double positive = static_cast<double>((s.array() == 1).count()) / 10000.0;
  EXPECT_NEAR(positive, 0.5, 0.02);
}

TEST(Qos, Violations) {
  EXPECT_EQ(qos_violations(Eigen::Vector3d(3e5, 4e5, 1e6), 2e5), 0);
  EXPECT_EQ(qos_violations(Eigen::Vector3d::Zero(), 2e5), 3);
  EXPECT_EQ(qos_violations(Eigen::Vector3d::Zero(), 0.0), 0);
}

TEST(EncodeState, LosslessFlattening) {
  Environment env(tiny_config(), 3);
  const Eigen::VectorXd s = env.reset();
  EXPECT_EQ(s.size(), 43);
  ChannelSet changed = env.channels();
  changed.ris_user[1](2) += Complex(0.0, 1e-9);
  const Eigen::VectorXd t = encode_state(env.world(), changed, env.config().world, env.channel_scale());
  EXPECT_NE(s, t);
  // bs_ris is flattened row by row, real part first.
  const StateLayout& layout = env.state_layout();
  EXPECT_DOUBLE_EQ(s(layout.bs_ris() + 2), env.channels().bs_ris(0, 1).real() * env.channel_scale());
  EXPECT_DOUBLE_EQ(s(layout.ris_user(1) + 5), env.channels().ris_user[1](2).imag() * env.channel_scale());
}

TEST(EnvironmentStep, RequiresReset) {
  Environment env(tiny_config(), 1);
  EXPECT_THROW(env.step(hover_action(env)), std::logic_error);
  env.reset();
  HybridAction bad = hover_action(env);
  bad.discrete.resize(2);
  EXPECT_THROW(env.step(bad), std::invalid_argument);
}

TEST(EnvironmentStep, HoverCostsHoverPower) {
  Environment env(EnvConfig{}, 5);
  env.reset();
  const StepOutcome out = env.step(hover_action(env));
  EXPECT_NEAR(out.info.power.total, 181.29, 0.01);
  EXPECT_EQ(out.info.power.ris_drag, 0.0);
  const double recomputed = reward(out.info.rates, out.info.power.total, env.config().reward);
  EXPECT_NEAR(out.reward, recomputed, 1e-12);
}

TEST(EnvironmentStep, EpisodeLastsConfiguredSlots) {
  EnvConfig config = tiny_config();
  config.world.episode_steps = 30;
  Environment env(config, 7);
  env.reset();
  Rng rng(8);
  int transitions = 0;
  bool terminal = false;
  while (!terminal) {
    const StepOutcome out = env.step(random_action(env, rng));
    ++transitions;
    terminal = out.terminal;
    EXPECT_TRUE(out.info.coupling_ok);
    EXPECT_EQ(out.next_state.size(), env.state_dim());
    EXPECT_NEAR(out.reward, reward(out.info.rates, out.info.power.total, config.reward), 1e-12);
    EXPECT_LE((env.world().uav_pose - env.world().previous_uav_pose).norm(), config.world.v_max + 1e-12);
  }
  EXPECT_EQ(transitions, 30);
  EXPECT_THROW(env.step(random_action(env, rng)), std::logic_error);
}

TEST(EnvironmentStep, IdenticalSeedsAndActionsReproduce) {
  Environment a(tiny_config(), 11);
  Environment b(tiny_config(), 11);
  EXPECT_EQ(a.reset(), b.reset());
  Rng ra(3);
  Rng rb(3);
  for (int t = 0; t < 10; ++t) {
    const StepOutcome oa = a.step(random_action(a, ra));
    const StepOutcome ob = b.step(random_action(b, rb));
    EXPECT_EQ(oa.next_state, ob.next_state);
    EXPECT_EQ(oa.reward, ob.reward);
  }
}

TEST(Variants, StationaryAccountsNoPropulsion) {
  EnvConfig config = tiny_config();
  config.deployment = DeploymentMode::Stationary;
  Environment env(config, 2);
  env.reset();
  const Vec3 start = env.world().uav_pose;
  Rng rng(1);
  const StepOutcome out = env.step(random_action(env, rng));
  EXPECT_EQ(env.world().uav_pose, start);
  EXPECT_EQ(out.info.power.total, 0.0);
  const double hover = propulsion_power(config.uav, 0.0, 0.0).total;
  EXPECT_NEAR(out.info.efficiency, out.info.sum_rate / hover, 1e-9);

  config.stationary_power = StationaryPower::Hover;
  Environment charged(config, 2);
  charged.reset();
  EXPECT_NEAR(charged.step(random_action(charged, rng)).info.power.total, hover, 1e-9);
}

TEST(Variants, FlatTrajectoryKeepsAltitude) {
  EnvConfig config = tiny_config();
  config.deployment = DeploymentMode::Traj2d;
  Environment env(config, 2);
  env.reset();
  const double z = env.world().uav_pose.z();
  Rng rng(4);
  for (int t = 0; t < 5; ++t) env.step(random_action(env, rng));
  EXPECT_DOUBLE_EQ(env.world().uav_pose.z(), z);
}

TEST(Variants, AltitudeOnlyKeepsHorizontalPosition) {
  EnvConfig config = tiny_config();
  config.deployment = DeploymentMode::AltitudeOnly;
  Environment env(config, 2);
  env.reset();
  const Vec3 start = env.world().uav_pose;
  Rng rng(4);
  for (int t = 0; t < 5; ++t) env.step(random_action(env, rng));
  EXPECT_NEAR(env.world().uav_pose.x(), start.x(), 1e-9);
  EXPECT_NEAR(env.world().uav_pose.y(), start.y(), 1e-9);
}

TEST(Variants, SurfaceTypes) {
  const ActionLayout layout{2, 4, 2, false};
  Eigen::VectorXd raw = Eigen::VectorXd::Zero(layout.continuous_size());
  const DecodedContinuous decoded = decode_continuous(raw, layout, 10.0);
  const Eigen::VectorXi signs = Eigen::VectorXi::Ones(4);

  EnvConfig config = tiny_config();
  config.ris_type = RisType::ReflectOnly;
  const CoupledTrc reflect = Environment(config, 1).surface_response(decoded, signs);
  EXPECT_EQ(reflect.transmit.diagonal().norm(), 0.0);
  EXPECT_NEAR(reflect.reflect.diagonal().cwiseAbs().minCoeff(), 1.0, 1e-12);

  config.ris_type = RisType::DualTr;
  const CoupledTrc dual = Environment(config, 1).surface_response(decoded, signs);
  EXPECT_NEAR(dual.reflect.diagonal().head(2).cwiseAbs().minCoeff(), 1.0, 1e-12);
  EXPECT_EQ(dual.reflect.diagonal().tail(2).norm(), 0.0);
  EXPECT_NEAR(dual.transmit.diagonal().tail(2).cwiseAbs().minCoeff(), 1.0, 1e-12);
}

TEST(Variants, DualTrNeedsEvenElements) {
  EnvConfig config = tiny_config();
  config.ris_type = RisType::DualTr;
  config.channel.ris_elements = 9;
  EXPECT_THROW(Environment(config, 1), std::invalid_argument);
}

TEST(Variants, IndependentPhasesSkipCoupling) {
  EnvConfig config = tiny_config();
  config.ris_type = RisType::StarIndependent;
  Environment env(config, 1);
  EXPECT_EQ(env.discrete_dim(), 0);
  env.reset();
  Rng rng(2);
  const StepOutcome out = env.step(random_action(env, rng));
  EXPECT_TRUE(std::isfinite(out.reward));
}

}  // namespace
}  // namespace aerostar
