#include "checks.hpp"

#include "fd_oracle.hpp"

#include "aerostar/agents/learners.hpp"
#include "aerostar/channel.hpp"
#include "aerostar/energy.hpp"
#include "aerostar/environment.hpp"
#include "aerostar/fairness.hpp"
#include "aerostar/harness/experiments.hpp"
#include "aerostar/link_budget.hpp"
#include "aerostar/star_surface.hpp"

#include <cmath>
#include <fstream>
#include <map>
#include <numbers>
#include <sstream>

namespace aerostar::acceptance {

namespace {

constexpr double kPi = std::numbers::pi;

std::string fmt(double x, int precision = 6) {
  std::ostringstream s;
  s.precision(precision);
  s << x;
  return s.str();
}

bool within_rel(double value, double expected, double tol) {
  return std::abs(value - expected) <= tol * std::abs(expected);
}

CheckResult hover_power(const std::filesystem::path&) {
  const UavParams p;
  const PowerBreakdown hover = propulsion_power(p, 0.0, 0.0);
  const double blade = p.delta / 8.0 * p.rho * p.solidity * p.disc_area * std::pow(p.tip_speed, 3);
  const double induced = std::pow(p.weight, 1.5) / (2.0 * p.rho * p.disc_area);
  const bool ok = within_rel(hover.blade, blade, 1e-3) && within_rel(hover.induced, induced, 1e-3) &&
                  within_rel(hover.blade, 79.86, 1e-3) && within_rel(hover.induced, 101.43, 1e-3) &&
                  hover.parasite == 0.0;
  return {ok, "blade " + fmt(hover.blade) + " W, induced " + fmt(hover.induced) + " W"};
}

CheckResult path_loss(const std::filesystem::path&) {
  const double los = path_loss_los_db(5.0, 1000.0);
  const double expected = 20.0 * std::log10(5.0) + 28.0 + 22.0 * 3.0;
  // Short aerial link: raw NLoS falls below LoS and is clamped up to it.
  const double near_nlos = 36.7 * std::log10(10.0) - 0.3 * (150.0 - 1.5) + 26.0 * std::log10(5.0) + 22.7;
  const double near_los = path_loss_los_db(5.0, 10.0);
  const double clamped = path_loss_nlos_db(5.0, 10.0, 150.0);
  // Long ground link: NLoS exceeds LoS and is used as is.
  const double far_nlos = 36.7 * 3.0 + 26.0 * std::log10(5.0) + 22.7;
  const double unclamped = path_loss_nlos_db(5.0, 1000.0, 1.5);
  const bool ok = std::abs(los - 107.979) < 1e-3 && std::abs(los - expected) < 1e-6 && near_nlos < near_los &&
                  std::abs(clamped - near_los) < 1e-12 && far_nlos > los && std::abs(unclamped - far_nlos) < 1e-9;
  return {ok, "L_LoS(5 GHz, 1 km) = " + fmt(los, 9) + " dB, clamp " + fmt(clamped) + " = LoS " + fmt(near_los)};
}

CheckResult ris_drag(const std::filesystem::path&) {
  const double area = ris_area(4, 0.06, 2.0);
  const double drag = ris_drag_power(area, 1.225, 2.1, 10.0);
  const double expected = 0.5 * 1.225 * 0.0081 * 2.1 * 1000.0;
  const bool ok = std::abs(area - 0.0081) < 1e-12 && within_rel(drag, 10.42, 1e-3) && within_rel(drag, expected, 1e-12);
  return {ok, "A = " + fmt(area) + " m^2, P_drag(10 m/s) = " + fmt(drag) + " W"};
}

CheckResult velocity_area(const std::filesystem::path& scratch) {
  harness::ExperimentConfig config;
  config.sweep.areas = {0.0, 0.0081, 0.25, 1.0};
  config.sweep.velocity_max = 30.0;
  config.sweep.velocity_step = 0.5;
  const auto rows = harness::run_velocity_area_sweep(config, scratch / "velocity");
  std::vector<double> argmins;
  std::size_t zero_area_index = 0;
  std::size_t zero_area_points = 0;
  for (const auto& r : rows) {
    if (r.area == 0.0) ++zero_area_points;
    if (!r.argmin) continue;
    argmins.push_back(r.velocity);
    if (r.area == 0.0) zero_area_index = static_cast<std::size_t>(std::lround(r.velocity / 0.5));
  }
  bool ok = rows.size() == 4 * 61 && argmins.size() == 4;
  for (std::size_t i = 1; ok && i < argmins.size(); ++i) ok = argmins[i] <= argmins[i - 1];
  const bool interior = zero_area_index > 0 && zero_area_index + 1 < zero_area_points;
  std::string detail = "argmin v per area:";
  for (const double v : argmins) detail += " " + fmt(v);
  return {ok && interior, detail + (interior ? ", zero-area minimum interior" : ", zero-area minimum on the edge")};
}

CheckResult fairness(const std::filesystem::path& scratch) {
  const Eigen::Vector2d pair(1.0, 3.0);
  const double hfi = harmonic_fairness_index(pair);
  const double jfi = jain_index(pair);
  bool ok = std::abs(hfi - 0.75) < 1e-15 && std::abs(jfi - 0.8) < 1e-15;

  Rng rng(2024);
  int am_hm_violations = 0;
  for (int t = 0; t < 10000; ++t) {
    const int j = 2 + static_cast<int>(rng.index(7));
    Eigen::VectorXd r(j);
    for (int k = 0; k < j; ++k) r(k) = rng.uniform(1e-3, 10.0);
    const double h = harmonic_fairness_index(r);
    const double hm = j / r.cwiseInverse().sum();
    const double am = r.mean();
    if (!(h <= 1.0 + 1e-12) || std::abs(h - hm / am) > 1e-12 || !(h < 1.0)) ++am_hm_violations;
    const Eigen::VectorXd equal = Eigen::VectorXd::Constant(j, r(0));
    if (std::abs(harmonic_fairness_index(equal) - 1.0) > 1e-12) ++am_hm_violations;
  }
  ok = ok && am_hm_violations == 0;

  harness::ExperimentConfig config;
  config.sweep.cv_grid = {0.3, 0.6, 1.0};
  config.sweep.fairness_users = {2, 4, 8};
  config.sweep.fairness_samples = 20000;
  const auto rows = harness::run_fairness_sweep(config, scratch / "fairness");
  std::map<double, std::vector<double>> hfi_by_cv;
  int order_violations = 0;
  for (const auto& r : rows) {
    if (!(r.mean_hfi < r.mean_jfi)) ++order_violations;
    hfi_by_cv[r.cv].push_back(r.mean_hfi);
  }
  for (const auto& [cv, means] : hfi_by_cv) {
    for (std::size_t i = 1; i < means.size(); ++i) {
      if (!(means[i] < means[i - 1])) ++order_violations;
    }
  }
  ok = ok && order_violations == 0 && rows.size() == 9;
  return {ok, "HFI([1,3]) = " + fmt(hfi) + ", JFI([1,3]) = " + fmt(jfi) + ", AM-HM violations " +
                  std::to_string(am_hm_violations) + ", CV-sweep ordering violations " + std::to_string(order_violations)};
}

CheckResult gradients(const std::filesystem::path&) {
  Rng rng(606);
  nn::Mlp actor(nn::MlpSpec{{43, 256, 256, 27},
                            {nn::Activation::Relu, nn::Activation::Relu, nn::Activation::Tanh},
                            true,
                            nn::OutputInit::SmallUniform},
                rng);
  nn::Critic critic(nn::CriticSpec{43, 27, 256, true}, rng);
  const GradCheckReport a = check_mlp_gradients(actor, 5, 8, 61);
  const GradCheckReport c = check_critic_gradients(critic, 5, 8, 62);
  const bool ok = a.max_relative_error < 1e-4 && c.max_relative_error < 1e-4 && a.batches == 5 && c.batches == 5;
  return {ok, "actor max rel err " + fmt(a.max_relative_error, 3) + " over " + std::to_string(a.parameters_checked) +
                  " checks, critic " + fmt(c.max_relative_error, 3) + " over " + std::to_string(c.parameters_checked)};
}

CheckResult sinr_oracle(const std::filesystem::path&) {
  Rng rng(707);
  double worst = 0.0;
  for (int t = 0; t < 100; ++t) {
    const int m = 2 + static_cast<int>(rng.index(3));
    const int n = std::vector<int>{4, 9, 16}[rng.index(3)];
    const int users = 2 + static_cast<int>(rng.index(3));
    const CMatrix h = sample_complex_gaussian(rng, n, m);
    CVector phi_diag(n);
    for (int e = 0; e < n; ++e) phi_diag(e) = std::polar(rng.uniform(0.0, 1.0), rng.uniform(-kPi, kPi));
    const DiagonalC phi(phi_diag);
    const CMatrix v = sample_complex_gaussian(rng, m, users);
    const double noise = rng.uniform(0.01, 1.0);

    CMatrix eff(users, m);
    std::vector<CVector> bs_user, ris_user;
    for (int j = 0; j < users; ++j) {
      bs_user.push_back(sample_complex_gaussian(rng, m, 1).col(0));
      ris_user.push_back(sample_complex_gaussian(rng, n, 1).col(0));
      eff.row(j) = effective_channel(bs_user.back(), ris_user.back(), phi, h);
    }
    for (int j = 0; j < users; ++j) {
      // Direct sums over antennas and elements.
      std::vector<Complex> g(m);
      for (int a = 0; a < m; ++a) {
        Complex acc = bs_user[j](a);
        for (int e = 0; e < n; ++e) acc += ris_user[j](e) * phi_diag(e) * h(e, a);
        g[a] = acc;
      }
      double signal = 0.0, interference = 0.0;
      for (int k = 0; k < users; ++k) {
        Complex s = 0.0;
        for (int a = 0; a < m; ++a) s += g[a] * v(a, k);
        (k == j ? signal : interference) += std::norm(s);
      }
      const double naive = signal / (interference + noise);
      const double fast = sinr(eff, v, j, noise);
      worst = std::max(worst, std::abs(fast - naive) / std::max(1.0, std::abs(naive)));
      for (int a = 0; a < m; ++a) worst = std::max(worst, std::abs(eff(j, a) - g[a]));
    }
  }
  return {worst < 1e-10, "max deviation " + fmt(worst, 3) + " over 100 instances"};
}

CheckResult coupling(const std::filesystem::path&) {
  EnvConfig config;
  Environment env(config, 808);
  Rng rng(809);
  const ActionLayout& layout = env.action_layout();
  int violations = 0;
  double worst_phase = 0.0, worst_amp = 0.0;
  for (int t = 0; t < 10000; ++t) {
    Eigen::VectorXd raw(layout.continuous_size());
    for (Eigen::Index i = 0; i < raw.size(); ++i) raw(i) = rng.uniform(-1.0, 1.0);
    Eigen::VectorXi signs(layout.discrete_size());
    for (Eigen::Index i = 0; i < signs.size(); ++i) signs(i) = rng.bernoulli(0.5) ? 1 : -1;
    const DecodedContinuous d = decode_continuous(raw, layout, config.world.v_max);
    const CoupledTrc trc = env.surface_response(d, signs);
    for (Eigen::Index e = 0; e < trc.reflect.rows(); ++e) {
      const Complex r = trc.reflect.diagonal()(e);
      const Complex tr = trc.transmit.diagonal()(e);
      const double amp = std::abs(std::norm(r) + std::norm(tr) - 1.0);
      const double phase = std::abs(std::abs(wrap_phase(std::arg(tr) - std::arg(r))) - kPi / 2.0);
      worst_amp = std::max(worst_amp, amp);
      if (std::abs(r) > 1e-12 && std::abs(tr) > 1e-12) worst_phase = std::max(worst_phase, phase);
      if (amp > 1e-9 || (std::abs(r) > 1e-12 && std::abs(tr) > 1e-12 && phase > 1e-9)) ++violations;
    }
  }
  return {violations == 0, "worst |beta_R^2 + beta_T^2 - 1| " + fmt(worst_amp, 3) + ", worst phase-gap error " +
                               fmt(worst_phase, 3)};
}

CheckResult channel_statistics(const std::filesystem::path&) {
  ChannelParams params;
  params.bs_antennas = 2;
  params.ris_elements = 4;
  const Vec3 bs(0.0, 0.0, 25.0);
  const Vec3 uav(1000.0, 0.0, 30.0);
  const Vec3 normal = panel_normal_toward(bs, uav);
  const double gain = db_to_linear_gain(path_loss_los_db(params.carrier_ghz, (uav - bs).norm()));
  Rng rng(909);
  const int draws = 100000;
  double total = 0.0;
  double m1 = 0.0, m2 = 0.0;
  for (int t = 0; t < draws; ++t) {
    const CMatrix h = sample_bs_ris_channel(params, bs, uav, normal, rng);
    total += h.squaredNorm();
    const double p = std::norm(h(0, 0)) / gain;
    m1 += p;
    m2 += p * p;
  }
  const double mean_power = total / (static_cast<double>(draws) * params.bs_antennas * params.ris_elements) / gain;
  m1 /= draws;
  m2 /= draws;
  const double gamma = (m2 - m1 * m1) / (m1 * m1);
  const double root = std::sqrt(std::max(0.0, 1.0 - gamma));
  const double k_hat = root / (1.0 - root);

  const double nlos_gain = db_to_linear_gain(path_loss_nlos_db(params.carrier_ghz, 120.0, 30.0));
  double rayleigh = 0.0;
  for (int t = 0; t < draws; ++t) rayleigh += sample_rayleigh_channel(params, 120.0, 30.0, 4, 1, rng).squaredNorm();
  const double rayleigh_ratio = rayleigh / (4.0 * draws) / nlos_gain;

  const bool ok = std::abs(mean_power - 1.0) < 0.02 && std::abs(rayleigh_ratio - 1.0) < 0.02 &&
                  std::abs(k_hat - params.rician_kappa) <= 0.05 * params.rician_kappa;
  return {ok, "Rician mean power / gain " + fmt(mean_power) + ", Rayleigh " + fmt(rayleigh_ratio) + ", K estimate " +
                  fmt(k_hat)};
}

std::vector<std::string> strip_last_column(const std::filesystem::path& csv) {
  std::ifstream in(csv);
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(in, line)) lines.push_back(line.substr(0, line.rfind(',')));
  return lines;
}

CheckResult determinism(const std::filesystem::path& scratch) {
  harness::ExperimentConfig config;
  config.episodes = 5;
  config.seeds = {7};
  config.threads = 1;
  const auto a = harness::run_training(config, scratch / "determinism_a");
  const auto b = harness::run_training(config, scratch / "determinism_b");
  const auto la = strip_last_column(a.seeds.front().metrics_csv);
  const auto lb = strip_last_column(b.seeds.front().metrics_csv);
  const bool ok = la == lb && la.size() == 1 + 5 * 31;
  return {ok, std::to_string(la.size()) + " lines per run, " + (la == lb ? "identical" : "different") +
                  " outside wall_ms"};
}

agents::Batch synthetic_batch(const agents::Agent& agent, Rng& rng, int size) {
  const auto& ctx = agent.context();
  const Eigen::Index c = ctx.action.continuous_size();
  const Eigen::Index d = ctx.action.discrete_size();
  std::vector<agents::Transition> items;
  for (int i = 0; i < size; ++i) {
    agents::Transition t;
    t.state.resize(ctx.state.size());
    t.next_state.resize(ctx.state.size());
    for (Eigen::Index k = 0; k < t.state.size(); ++k) {
      t.state(k) = rng.normal();
      t.next_state(k) = rng.normal();
    }
    t.action.resize(c + d);
    for (Eigen::Index k = 0; k < c; ++k) t.action(k) = rng.uniform(-1.0, 1.0);
    for (Eigen::Index k = 0; k < d; ++k) t.action(c + k) = rng.bernoulli(0.5) ? 1.0 : -1.0;
    t.action_index = static_cast<int>(rng.index(agents::DqnAgent::kActions));
    t.reward = rng.normal();
    t.terminal = false;
    items.push_back(std::move(t));
  }
  return agents::make_batch(items);
}

CheckResult overfit(const std::filesystem::path&) {
  EnvConfig env_config;
  Environment env(env_config, 1212);
  const agents::AgentContext ctx{env.state_layout(), env.action_layout()};
  bool ok = true;
  std::string detail;
  for (const auto kind : {agents::AgentKind::DaDdpg, agents::AgentKind::Ddpg, agents::AgentKind::Dqn}) {
    auto agent = agents::make_agent(kind, agents::AgentConfig{}, ctx, 1213);
    Rng rng(1214);
    const agents::Batch batch = synthetic_batch(*agent, rng, static_cast<int>(agent->config().batch_size));
    std::vector<double> losses;
    for (int update = 0; update <= 50; ++update) losses.push_back(agent->train_on_batch(batch).critic_loss);
    int rises = 0;
    for (std::size_t i = 1; i < losses.size(); ++i) rises += losses[i] > losses[i - 1] ? 1 : 0;
    const bool pass = losses.back() < 0.1 * losses.front();
    ok = ok && pass;
    detail += (detail.empty() ? "" : "; ") + agents::to_string(kind) + " " + fmt(losses.front(), 4) + " -> " +
              fmt(losses.back(), 4) + " (" + std::to_string(rises) + " rises)";
  }
  return {ok, detail};
}

CheckResult learning(const std::filesystem::path& scratch) {
  harness::ExperimentConfig config;
  config.env.channel.bs_antennas = 2;
  config.env.channel.ris_elements = 4;
  config.env.world.reflect_users = 1;
  config.env.world.transmit_users = 1;
  config.env.world.episode_steps = 30;
  config.episodes = 400;
  config.seeds = {1, 2, 3};
  config.log_steps = false;

  config.agent_kind = agents::AgentKind::DaDdpg;
  const auto trained = harness::run_training(config, scratch / "learning_daddpg");
  config.agent_kind = agents::AgentKind::Random;
  const auto random = harness::run_training(config, scratch / "learning_random");

  double last = 0.0, first = 0.0, baseline = 0.0;
  std::string per_seed;
  for (std::size_t i = 0; i < config.seeds.size(); ++i) {
    const auto& s = trained.seeds[i];
    const auto& r = random.seeds[i];
    double r_mean = 0.0;
    for (const double x : r.episode_returns) r_mean += x;
    r_mean /= static_cast<double>(r.episode_returns.size());
    last += s.last50_mean;
    first += s.first50_mean;
    baseline += r_mean;
    per_seed += " seed " + std::to_string(s.seed) + ": " + fmt(s.first50_mean, 5) + " -> " + fmt(s.last50_mean, 5) +
                " vs random " + fmt(r_mean, 5) + ";";
  }
  const double n = static_cast<double>(config.seeds.size());
  last /= n;
  first /= n;
  baseline /= n;
  const double margin = (last - baseline) / std::abs(baseline);
  const bool ok = margin >= 0.2 && last > first;
  return {ok, "final-50 mean " + fmt(last, 5) + ", first-50 " + fmt(first, 5) + ", random " + fmt(baseline, 5) +
                  ", margin over random " + fmt(100.0 * margin, 3) + "% |" + per_seed};
}

}  // namespace

std::vector<Check> fast_checks() {
  return {
      {1, "hover propulsion power", hover_power},
      {2, "3GPP path loss", path_loss},
      {3, "panel area and drag", ris_drag},
      {4, "power-optimal velocity versus panel area", velocity_area},
      {5, "fairness indices", fairness},
      {6, "backpropagation versus central differences", gradients},
      {7, "effective channel and SINR versus direct sums", sinr_oracle},
      {8, "coupled-phase invariants", coupling},
      {9, "channel statistics", channel_statistics},
      {10, "training determinism", determinism},
      {12, "single-batch critic overfit", overfit},
  };
}

std::vector<Check> learning_checks() { return {{11, "tiny-config learning versus random policy", learning}}; }

int run_checks(const std::vector<Check>& checks, const std::filesystem::path& scratch, std::ostream& out) {
  int failures = 0;
  for (const auto& check : checks) {
    CheckResult result;
    try {
      std::filesystem::create_directories(scratch);
      result = check.run(scratch);
    } catch (const std::exception& e) {
      result = {false, std::string("exception: ") + e.what()};
    }
    if (!result.pass) ++failures;
    out << (result.pass ? "PASS" : "FAIL") << " [" << check.id << "] " << check.title << ": " << result.detail
        << std::endl;
  }
  return failures;
}

}  // namespace aerostar::acceptance
