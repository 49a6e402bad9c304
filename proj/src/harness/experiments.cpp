#include "aerostar/harness/experiments.hpp"

#include "aerostar/agents/learners.hpp"
#include "aerostar/harness/metrics.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <exception>
#include <fstream>
#include <numbers>
#include <numeric>
#include <sstream>
#include <thread>

namespace aerostar::harness {

namespace {

using Clock = std::chrono::steady_clock;

double elapsed_ms(Clock::time_point since) {
  return std::chrono::duration<double, std::milli>(Clock::now() - since).count();
}

double mean_of(const std::vector<double>& xs, std::size_t begin, std::size_t end) {
  if (end <= begin) return 0.0;
  return std::accumulate(xs.begin() + static_cast<std::ptrdiff_t>(begin),
                         xs.begin() + static_cast<std::ptrdiff_t>(end), 0.0) /
         static_cast<double>(end - begin);
}

double head_mean(const std::vector<double>& xs, std::size_t n) { return mean_of(xs, 0, std::min(n, xs.size())); }

double tail_mean(const std::vector<double>& xs, std::size_t n) {
  return mean_of(xs, xs.size() - std::min(n, xs.size()), xs.size());
}

// Runs job(i) for i in [0, count) on up to `threads` workers; rethrows the
// first failure after all workers finish.
template <typename Job>
void parallel_for(std::size_t count, int threads, Job job) {
  std::size_t workers = threads > 0 ? static_cast<std::size_t>(threads)
                                    : std::max<std::size_t>(1, std::thread::hardware_concurrency());
  workers = std::min(workers, count);
  if (workers <= 1) {
    for (std::size_t i = 0; i < count; ++i) job(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::exception_ptr> errors(workers);
  std::vector<std::thread> pool;
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      try {
        for (std::size_t i = next++; i < count; i = next++) job(i);
      } catch (...) {
        errors[w] = std::current_exception();
      }
    });
  }
  for (auto& t : pool) t.join();
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

agents::AgentContext context_of(const Environment& env) {
  return agents::AgentContext{env.state_layout(), env.action_layout()};
}

MetricsRow step_row(int episode, int step, const StepOutcome& o, int users, double ma, double wall_ms) {
  MetricsRow r;
  r.episode = episode;
  r.step = step;
  r.reward = o.reward;
  r.sum_rate = o.info.sum_rate;
  r.power = o.info.power.total;
  r.efficiency = o.info.efficiency;
  r.hfi = o.info.hfi;
  r.jfi = o.info.jfi;
  r.qos_violation_rate = users > 0 ? static_cast<double>(o.info.qos_violations) / users : 0.0;
  r.uav_x = o.info.uav_pose.x();
  r.uav_y = o.info.uav_pose.y();
  r.uav_z = o.info.uav_pose.z();
  r.reward_ma50 = ma;
  r.wall_ms = wall_ms;
  return r;
}

// Per-episode means accumulated from step rows.
struct EpisodeAccumulator {
  MetricsRow sum;
  int steps = 0;

  void add(const MetricsRow& r) {
    sum.reward += r.reward;
    sum.sum_rate += r.sum_rate;
    sum.power += r.power;
    sum.efficiency += r.efficiency;
    sum.hfi += r.hfi;
    sum.jfi += r.jfi;
    sum.qos_violation_rate += r.qos_violation_rate;
    sum.uav_x = r.uav_x;
    sum.uav_y = r.uav_y;
    sum.uav_z = r.uav_z;
    ++steps;
  }

  MetricsRow aggregate(int episode) const {
    MetricsRow r = sum;
    const double n = std::max(steps, 1);
    r.episode = episode;
    r.step = -1;
    r.sum_rate /= n;
    r.power /= n;
    r.efficiency /= n;
    r.hfi /= n;
    r.jfi /= n;
    r.qos_violation_rate /= n;
    return r;
  }
};

std::string seed_stem(const ExperimentConfig& config, std::uint64_t seed) {
  return agents::to_string(config.agent_kind) + "_seed" + std::to_string(seed);
}

// Uniform raws for every surface entry, signs drawn uniformly.
HybridAction heuristic_action(const Environment& env, const Eigen::VectorXd& state, Rng& rng) {
  const ActionLayout& layout = env.action_layout();
  const WorldState& world = env.world();
  const WorldConfig& wc = env.config().world;
  HybridAction a;
  a.continuous = Eigen::VectorXd::Zero(layout.continuous_size());

  Eigen::Vector2d centroid = Eigen::Vector2d::Zero();
  for (const auto& p : world.user_positions) centroid += p.head<2>();
  if (!world.user_positions.empty()) centroid /= static_cast<double>(world.user_positions.size());
  const Eigen::Vector2d to_centroid = centroid - world.uav_pose.head<2>();
  const double speed = std::min(wc.v_max, to_centroid.norm() / wc.slot_duration);
  a.continuous(0) = wc.v_max > 0.0 ? 2.0 * speed / wc.v_max - 1.0 : -1.0;
  a.continuous(1) = 0.0;
  double azimuth = std::atan2(to_centroid.y(), to_centroid.x());
  if (azimuth < 0.0) azimuth += 2.0 * std::numbers::pi;
  a.continuous(2) = azimuth / std::numbers::pi - 1.0;

  const Eigen::Index surface_end = layout.beamformer();
  for (Eigen::Index i = layout.theta_r(); i < surface_end; ++i) a.continuous(i) = rng.uniform(-1.0, 1.0);
  a.continuous.tail(a.continuous.size() - surface_end) = agents::matched_filter_raw(state, env.state_layout());
  a.discrete.resize(layout.discrete_size());
  for (Eigen::Index i = 0; i < a.discrete.size(); ++i) a.discrete(i) = rng.bernoulli(0.5) ? 1 : -1;
  return a;
}

}  // namespace

std::filesystem::path resolve_output_dir(const ExperimentConfig& config, const std::string& verb) {
  if (!config.output_dir.empty()) return config.output_dir;
  return output_root() / verb;
}

nlohmann::json read_json(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read '" + path.string() + "'");
  try {
    return nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw std::runtime_error("malformed JSON in '" + path.string() + "': " + e.what());
  }
}

void write_json(const std::filesystem::path& path, const nlohmann::json& j) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::out | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot open '" + path.string() + "' for writing");
  out << j.dump(2) << '\n';
  if (!out) throw std::runtime_error("write to '" + path.string() + "' failed");
}

void save_checkpoint(const std::filesystem::path& path, const ExperimentConfig& config,
                     const agents::Agent& agent) {
  write_json(path, {{"agent", agents::to_string(agent.kind())},
                    {"config", serialize(config)},
                    {"state", agent.checkpoint()}});
}

SeedSummary train_seed(const ExperimentConfig& config, std::uint64_t seed, const std::filesystem::path& out_dir) {
  Environment env(config.env, seed);
  auto agent = agents::make_agent(config.agent_kind, config.agent, context_of(env), seed);
  const bool learns = config.agent_kind != agents::AgentKind::Random;
  const int users = config.env.world.user_count();

  SeedSummary summary;
  summary.seed = seed;
  summary.metrics_csv = out_dir / (seed_stem(config, seed) + ".csv");
  CsvWriter csv(summary.metrics_csv, metrics_header());
  MovingAverage step_ma(50);
  MovingAverage episode_ma(50);
  std::vector<double> efficiency;
  std::vector<double> qos;

  for (int e = 0; e < config.episodes; ++e) {
    const auto episode_start = Clock::now();
    Eigen::VectorXd state = env.reset();
    EpisodeAccumulator acc;
    int step = 0;
    while (!env.terminated()) {
      const auto step_start = Clock::now();
      const agents::Decision d = agent->act(state, true);
      StepOutcome o = env.step(d.action);
      if (learns) {
        agent->remember({state, d.critic_action, d.action_index, o.reward, o.next_state, o.terminal});
        agent->train_step();
      }
      const MetricsRow row = step_row(e, step, o, users, step_ma.push(o.reward), elapsed_ms(step_start));
      acc.add(row);
      if (config.log_steps) csv.write_line(format_row(row));
      state = std::move(o.next_state);
      ++step;
    }
    agent->end_episode();
    MetricsRow agg = acc.aggregate(e);
    agg.reward_ma50 = episode_ma.push(agg.reward);
    agg.wall_ms = elapsed_ms(episode_start);
    csv.write_line(format_row(agg));
    summary.episode_returns.push_back(agg.reward);
    efficiency.push_back(agg.efficiency);
    qos.push_back(agg.qos_violation_rate);
  }

  summary.first50_mean = head_mean(summary.episode_returns, 50);
  summary.last50_mean = tail_mean(summary.episode_returns, 50);
  summary.mean_efficiency = tail_mean(efficiency, 50);
  summary.mean_qos_violation_rate = tail_mean(qos, 50);
  if (learns) {
    summary.checkpoint = out_dir / (seed_stem(config, seed) + ".ckpt.json");
    save_checkpoint(summary.checkpoint, config, *agent);
  }
  return summary;
}

TrainingResult run_training(const ExperimentConfig& config, const std::filesystem::path& out_dir) {
  config.validate();
  std::filesystem::create_directories(out_dir);
  TrainingResult result;
  result.seeds.resize(config.seeds.size());
  parallel_for(config.seeds.size(), config.threads,
               [&](std::size_t i) { result.seeds[i] = train_seed(config, config.seeds[i], out_dir); });

  std::vector<double> finals;
  nlohmann::json per_seed = nlohmann::json::array();
  for (const auto& s : result.seeds) {
    finals.push_back(s.last50_mean);
    per_seed.push_back({{"seed", s.seed},
                        {"first50_mean_return", s.first50_mean},
                        {"last50_mean_return", s.last50_mean},
                        {"last50_mean_efficiency", s.mean_efficiency},
                        {"last50_qos_violation_rate", s.mean_qos_violation_rate},
                        {"metrics_csv", s.metrics_csv.filename().string()},
                        {"checkpoint", s.checkpoint.empty() ? "" : s.checkpoint.filename().string()}});
  }
  result.last50_mean = mean_of(finals, 0, finals.size());
  double var = 0.0;
  for (const double f : finals) var += (f - result.last50_mean) * (f - result.last50_mean);
  result.last50_std = finals.size() > 1 ? std::sqrt(var / static_cast<double>(finals.size() - 1)) : 0.0;

  result.summary_json = out_dir / "summary.json";
  write_json(result.summary_json, {{"agent", agents::to_string(config.agent_kind)},
                                   {"config", to_json(config)},
                                   {"seeds", per_seed},
                                   {"aggregate",
                                    {{"last50_mean_return", result.last50_mean},
                                     {"last50_std_return", result.last50_std}}}});
  return result;
}

std::vector<VelocityAreaRow> run_velocity_area_sweep(const ExperimentConfig& config,
                                                     const std::filesystem::path& out_dir) {
  config.validate();
  const auto points = static_cast<std::size_t>(std::floor(config.sweep.velocity_max / config.sweep.velocity_step + 1e-9)) + 1;
  std::vector<double> grid(points);
  for (std::size_t i = 0; i < points; ++i) grid[i] = static_cast<double>(i) * config.sweep.velocity_step;

  std::vector<VelocityAreaRow> rows;
  CsvWriter csv(out_dir / "velocity_area.csv", {"area", "velocity", "total_power", "argmin"});
  for (const double area : config.sweep.areas) {
    RisAeroParams ris = config.env.ris_aero();
    ris.area_override = area;
    const VelocitySweep sweep = velocity_sweep(config.env.uav, ris, grid);
    for (std::size_t i = 0; i < grid.size(); ++i) {
      VelocityAreaRow r{area, sweep.velocity[i], sweep.power[i], i == sweep.argmin};
      csv.write({format_double(r.area), format_double(r.velocity), format_double(r.total_power),
                 r.argmin ? "1" : "0"});
      rows.push_back(r);
    }
  }
  return rows;
}

std::vector<ElementsRow> run_elements_sweep(const ExperimentConfig& config, const std::filesystem::path& out_dir) {
  config.validate();
  struct Job {
    int elements;
    double v_max;
  };
  std::vector<Job> jobs;
  for (const int n : config.sweep.elements) {
    for (const double v : config.sweep.element_v_max) jobs.push_back({n, v});
  }
  std::vector<ElementsRow> rows(jobs.size());
  parallel_for(jobs.size(), config.threads, [&](std::size_t k) {
    EnvConfig env_config = config.env;
    env_config.channel.ris_elements = jobs[k].elements;
    env_config.world.v_max = jobs[k].v_max;
    if (env_config.ris_type == RisType::DualTr && jobs[k].elements % 2 != 0) {
      throw ConfigError("dual_tr needs even element counts in sweep.elements");
    }
    double eff = 0.0, rate = 0.0, power = 0.0, drag = 0.0;
    long steps = 0;
    for (const std::uint64_t seed : config.seeds) {
      Environment env(env_config, seed);
      Rng policy(derive_seed(seed, "heuristic"));
      for (int e = 0; e < config.sweep.element_episodes; ++e) {
        Eigen::VectorXd state = env.reset();
        while (!env.terminated()) {
          StepOutcome o = env.step(heuristic_action(env, state, policy));
          eff += o.info.efficiency;
          rate += o.info.sum_rate;
          power += o.info.power.total;
          drag += o.info.power.ris_drag;
          ++steps;
          state = std::move(o.next_state);
        }
      }
    }
    const double n = static_cast<double>(std::max(steps, 1L));
    rows[k] = ElementsRow{jobs[k].elements, jobs[k].v_max, eff / n, rate / n, power / n, drag / n};
  });

  CsvWriter csv(out_dir / "elements.csv",
                {"elements", "v_max", "mean_efficiency", "mean_sum_rate", "mean_power", "mean_ris_drag"});
  for (const auto& r : rows) {
    csv.write({std::to_string(r.elements), format_double(r.v_max), format_double(r.mean_efficiency),
               format_double(r.mean_sum_rate), format_double(r.mean_power), format_double(r.mean_ris_drag)});
  }
  return rows;
}

std::vector<FairnessRow> run_fairness_sweep(const ExperimentConfig& config, const std::filesystem::path& out_dir) {
  config.validate();
  Rng rng(derive_seed(config.seeds.front(), "fairness"));
  std::vector<FairnessRow> rows;
  CsvWriter csv(out_dir / "fairness.csv", {"cv", "users", "mean_hfi", "mean_jfi"});
  for (const double cv : config.sweep.cv_grid) {
    const double sigma2 = std::log1p(cv * cv);
    const double sigma = std::sqrt(sigma2);
    const double mu = -sigma2 / 2.0;
    for (const int users : config.sweep.fairness_users) {
      double hfi = 0.0;
      double jfi = 0.0;
      Eigen::VectorXd r(users);
      for (int s = 0; s < config.sweep.fairness_samples; ++s) {
        for (int j = 0; j < users; ++j) r(j) = std::exp(mu + sigma * rng.normal());
        hfi += harmonic_fairness_index(r);
        jfi += jain_index(r);
      }
      const double n = config.sweep.fairness_samples;
      FairnessRow row{cv, users, hfi / n, jfi / n};
      csv.write({format_double(row.cv), std::to_string(row.users), format_double(row.mean_hfi),
                 format_double(row.mean_jfi)});
      rows.push_back(row);
    }
  }
  return rows;
}

ExperimentConfig apply_variant(ExperimentConfig config, const std::string& variant) {
  EnvConfig& env = config.env;
  if (variant == "traj3d") {
    env.deployment = DeploymentMode::Traj3d;
  } else if (variant == "traj2d") {
    env.deployment = DeploymentMode::Traj2d;
  } else if (variant == "altitude_only") {
    env.deployment = DeploymentMode::AltitudeOnly;
  } else if (variant == "stationary") {
    env.deployment = DeploymentMode::Stationary;
  } else if (variant == "star_coupled") {
    env.ris_type = RisType::StarCoupled;
  } else if (variant == "star_independent") {
    env.ris_type = RisType::StarIndependent;
  } else if (variant == "dual_tr") {
    env.ris_type = RisType::DualTr;
  } else if (variant == "reflect_only") {
    env.ris_type = RisType::ReflectOnly;
  } else if (variant == "reward_hfi") {
    env.reward.weight = FairnessWeight::Hfi;
  } else if (variant == "reward_jfi") {
    env.reward.weight = FairnessWeight::Jfi;
  } else if (variant == "reward_none") {
    env.reward.weight = FairnessWeight::None;
  } else {
    throw ConfigError("unknown ablation variant '" + variant + "'");
  }
  return config;
}

std::vector<AblationRow> run_ablation(const ExperimentConfig& config, const std::filesystem::path& out_dir) {
  config.validate();
  std::vector<AblationRow> rows;
  std::vector<ExperimentConfig> variants;
  for (const auto& name : config.sweep.ablation_variants) variants.push_back(apply_variant(config, name));
  for (std::size_t v = 0; v < variants.size(); ++v) {
    const auto& name = config.sweep.ablation_variants[v];
    const TrainingResult result = run_training(variants[v], out_dir / name);
    for (const auto& s : result.seeds) {
      rows.push_back({name, s.seed, s.last50_mean, s.mean_efficiency, s.mean_qos_violation_rate});
    }
  }
  CsvWriter csv(out_dir / "ablation.csv",
                {"variant", "seed", "last50_mean_return", "mean_efficiency", "qos_violation_rate"});
  for (const auto& r : rows) {
    csv.write({r.variant, std::to_string(r.seed), format_double(r.last50_mean), format_double(r.mean_efficiency),
               format_double(r.mean_qos_violation_rate)});
  }
  return rows;
}

EvalResult run_eval(const ExperimentConfig& config, const std::filesystem::path& out_dir) {
  config.validate();
  if (config.checkpoint.empty()) throw ConfigError("eval needs run.checkpoint (or --checkpoint)");
  const nlohmann::json file = read_json(config.checkpoint);
  agents::AgentKind kind;
  try {
    kind = agents::agent_kind_from(file.at("agent").get<std::string>());
  } catch (const std::exception& e) {
    throw ConfigError(std::string("checkpoint has no valid agent kind: ") + e.what());
  }
  const std::uint64_t seed = config.seeds.front();
  Environment env(config.env, seed);
  auto agent = agents::make_agent(kind, config.agent, context_of(env), seed);
  try {
    agent->restore(file.at("state"));
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("checkpoint does not fit this configuration: ") + e.what());
  }

  EvalResult result;
  result.metrics_csv = out_dir / (agents::to_string(kind) + "_eval.csv");
  CsvWriter csv(result.metrics_csv, metrics_header());
  MovingAverage step_ma(50);
  MovingAverage episode_ma(50);
  const int users = config.env.world.user_count();
  double eff = 0.0;
  for (int e = 0; e < config.eval_episodes; ++e) {
    const auto episode_start = Clock::now();
    Eigen::VectorXd state = env.reset();
    EpisodeAccumulator acc;
    int step = 0;
    while (!env.terminated()) {
      const auto step_start = Clock::now();
      StepOutcome o = env.step(agent->act(state, false).action);
      const MetricsRow row = step_row(e, step++, o, users, step_ma.push(o.reward), elapsed_ms(step_start));
      acc.add(row);
      if (config.log_steps) csv.write_line(format_row(row));
      state = std::move(o.next_state);
    }
    MetricsRow agg = acc.aggregate(e);
    agg.reward_ma50 = episode_ma.push(agg.reward);
    agg.wall_ms = elapsed_ms(episode_start);
    csv.write_line(format_row(agg));
    result.episode_returns.push_back(agg.reward);
    eff += agg.efficiency;
  }
  result.mean_return = mean_of(result.episode_returns, 0, result.episode_returns.size());
  result.mean_efficiency = eff / config.eval_episodes;
  write_json(out_dir / "eval.json", {{"agent", agents::to_string(kind)},
                                     {"checkpoint", config.checkpoint},
                                     {"episodes", config.eval_episodes},
                                     {"episode_returns", result.episode_returns},
                                     {"mean_return", result.mean_return},
                                     {"mean_efficiency", result.mean_efficiency}});
  return result;
}

}  // namespace aerostar::harness
