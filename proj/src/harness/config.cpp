#include "aerostar/harness/config.hpp"

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <limits>
#include <sstream>
#include <utility>

namespace aerostar::harness {

namespace {

using Getter = std::function<std::string(const ExperimentConfig&)>;
using Setter = std::function<void(ExperimentConfig&, const std::string&)>;

struct Field {
  std::string key;
  Getter get;
  Setter set;
};

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  const std::string t = trim(s);
  if (t.empty()) return out;
  std::stringstream ss(t);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(trim(item));
  return out;
}

double parse_double(const std::string& raw) {
  const std::string s = trim(raw);
  double x = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), x);
  if (s.empty() || ec != std::errc() || ptr != s.data() + s.size()) {
    throw ConfigError("not a number: '" + raw + "'");
  }
  return x;
}

template <typename Int>
Int parse_int(const std::string& raw) {
  const std::string s = trim(raw);
  Int x = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), x);
  if (s.empty() || ec != std::errc() || ptr != s.data() + s.size()) {
    throw ConfigError("not an integer: '" + raw + "'");
  }
  return x;
}

bool parse_bool(const std::string& raw) {
  const std::string s = trim(raw);
  if (s == "true" || s == "1") return true;
  if (s == "false" || s == "0") return false;
  throw ConfigError("not a boolean: '" + raw + "'");
}

template <typename T>
std::string join(const std::vector<T>& xs, const std::function<std::string(const T&)>& f) {
  std::string out;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (i) out += ", ";
    out += f(xs[i]);
  }
  return out;
}

std::string fmt_doubles(const std::vector<double>& xs) {
  return join<double>(xs, [](const double& x) { return format_double(x); });
}

std::vector<double> parse_doubles(const std::string& s) {
  std::vector<double> out;
  for (const auto& item : split_list(s)) out.push_back(parse_double(item));
  return out;
}

template <typename Int>
std::string fmt_ints(const std::vector<Int>& xs) {
  return join<Int>(xs, [](const Int& x) { return std::to_string(x); });
}

template <typename Int>
std::vector<Int> parse_ints(const std::string& s) {
  std::vector<Int> out;
  for (const auto& item : split_list(s)) out.push_back(parse_int<Int>(item));
  return out;
}

template <typename Vec>
std::string fmt_vec(const Vec& v) {
  std::vector<double> xs(v.data(), v.data() + v.size());
  return fmt_doubles(xs);
}

template <typename Vec>
Vec parse_vec(const std::string& s) {
  const auto xs = parse_doubles(s);
  Vec v;
  if (static_cast<Eigen::Index>(xs.size()) != v.size()) {
    throw ConfigError("expected " + std::to_string(v.size()) + " comma-separated numbers, got '" + s + "'");
  }
  for (Eigen::Index i = 0; i < v.size(); ++i) v(i) = xs[static_cast<std::size_t>(i)];
  return v;
}

template <typename E>
using Names = std::vector<std::pair<E, std::string>>;

template <typename E>
std::string enum_name(E value, const Names<E>& names) {
  for (const auto& [e, n] : names) {
    if (e == value) return n;
  }
  throw ConfigError("unnamed enum value");
}

template <typename E>
E enum_from(const std::string& raw, const Names<E>& names) {
  const std::string s = trim(raw);
  std::string options;
  for (const auto& [e, n] : names) {
    if (n == s) return e;
    options += (options.empty() ? "" : ", ") + n;
  }
  throw ConfigError("'" + s + "' is not one of: " + options);
}

const Names<MobilityModel> kMobility{{MobilityModel::RandomWalk, "random_walk"},
                                     {MobilityModel::Directional, "directional"}};
const Names<InducedModel> kInduced{{InducedModel::PaperLiteral, "paper_literal"},
                                   {InducedModel::MomentumTheory, "momentum_theory"}};
const Names<ClimbModel> kClimb{{ClimbModel::Clamped, "clamped"}, {ClimbModel::Signed, "signed"}};
const Names<VPerpMode> kVPerp{{VPerpMode::FullSpeed, "full_speed"},
                              {VPerpMode::NormalComponent, "normal_component"}};
const Names<PowerMode> kPowerMode{{PowerMode::Total, "total"}, {PowerMode::PerUser, "per_user"}};
const Names<FairnessWeight> kFairness{
    {FairnessWeight::Hfi, "hfi"}, {FairnessWeight::Jfi, "jfi"}, {FairnessWeight::None, "none"}};
const Names<DeploymentMode> kDeployment{{DeploymentMode::Traj3d, "traj3d"},
                                        {DeploymentMode::Traj2d, "traj2d"},
                                        {DeploymentMode::AltitudeOnly, "altitude_only"},
                                        {DeploymentMode::Stationary, "stationary"}};
const Names<RisType> kRisType{{RisType::StarCoupled, "star_coupled"},
                              {RisType::StarIndependent, "star_independent"},
                              {RisType::DualTr, "dual_tr"},
                              {RisType::ReflectOnly, "reflect_only"}};
const Names<StationaryPower> kStationary{{StationaryPower::Hover, "hover"}, {StationaryPower::None, "none"}};

#define AEROSTAR_DOUBLE(key, member)                                                  \
  Field {                                                                             \
    key, [](const ExperimentConfig& c) { return format_double(c.member); },           \
        [](ExperimentConfig& c, const std::string& v) { c.member = parse_double(v); } \
  }
#define AEROSTAR_INT(key, member)                                                                  \
  Field {                                                                                          \
    key, [](const ExperimentConfig& c) { return std::to_string(c.member); },                       \
        [](ExperimentConfig& c, const std::string& v) { c.member = parse_int<decltype(c.member)>(v); } \
  }
#define AEROSTAR_ENUM(key, member, table)                                                  \
  Field {                                                                                  \
    key, [](const ExperimentConfig& c) { return enum_name(c.member, table); },             \
        [](ExperimentConfig& c, const std::string& v) { c.member = enum_from(v, table); } \
  }
#define AEROSTAR_VEC(key, member, type)                                                       \
  Field {                                                                                     \
    key, [](const ExperimentConfig& c) { return fmt_vec(c.member); },                         \
        [](ExperimentConfig& c, const std::string& v) { c.member = parse_vec<type>(v); } \
  }

const std::vector<Field>& fields() {
  static const std::vector<Field> table{
      AEROSTAR_VEC("world.bs_position", env.world.bs_position, Vec3),
      AEROSTAR_VEC("world.uav_position", env.world.initial_uav_position, Vec3),
      AEROSTAR_INT("world.reflect_users", env.world.reflect_users),
      AEROSTAR_INT("world.transmit_users", env.world.transmit_users),
      AEROSTAR_DOUBLE("world.user_speed", env.world.user_speed),
      AEROSTAR_DOUBLE("world.user_height", env.world.user_height),
      AEROSTAR_ENUM("world.mobility", env.world.mobility, kMobility),
      Field{"world.drift_heading",
            [](const ExperimentConfig& c) {
              return std::isnan(c.env.world.drift_heading) ? std::string("random")
                                                           : format_double(c.env.world.drift_heading);
            },
            [](ExperimentConfig& c, const std::string& v) {
              c.env.world.drift_heading =
                  trim(v) == "random" ? std::numeric_limits<double>::quiet_NaN() : parse_double(v);
            }},
      AEROSTAR_DOUBLE("world.drift_jitter", env.world.drift_jitter),
      AEROSTAR_VEC("world.area_min", env.world.area_min, Eigen::Vector2d),
      AEROSTAR_VEC("world.area_max", env.world.area_max, Eigen::Vector2d),
      AEROSTAR_INT("world.episode_steps", env.world.episode_steps),
      AEROSTAR_DOUBLE("world.slot_duration", env.world.slot_duration),
      AEROSTAR_DOUBLE("world.v_max", env.world.v_max),
      AEROSTAR_DOUBLE("world.min_altitude", env.world.min_altitude),
      AEROSTAR_DOUBLE("world.max_altitude", env.world.max_altitude),

      AEROSTAR_DOUBLE("channel.carrier_ghz", env.channel.carrier_ghz),
      AEROSTAR_DOUBLE("channel.rician_kappa", env.channel.rician_kappa),
      AEROSTAR_INT("channel.bs_antennas", env.channel.bs_antennas),
      AEROSTAR_INT("channel.ris_elements", env.channel.ris_elements),
      AEROSTAR_DOUBLE("channel.spacing_divisor", env.channel.spacing_divisor),

      AEROSTAR_DOUBLE("uav.rho", env.uav.rho),
      AEROSTAR_DOUBLE("uav.delta", env.uav.delta),
      AEROSTAR_DOUBLE("uav.disc_area", env.uav.disc_area),
      AEROSTAR_DOUBLE("uav.solidity", env.uav.solidity),
      AEROSTAR_DOUBLE("uav.tip_speed", env.uav.tip_speed),
      AEROSTAR_DOUBLE("uav.induced_velocity", env.uav.induced_velocity),
      AEROSTAR_DOUBLE("uav.d0", env.uav.d0),
      AEROSTAR_DOUBLE("uav.weight", env.uav.weight),
      AEROSTAR_ENUM("uav.induced_model", env.uav.induced_model, kInduced),
      AEROSTAR_ENUM("uav.climb_model", env.uav.climb_model, kClimb),

      AEROSTAR_DOUBLE("ris.drag_coeff", env.drag_coeff),
      AEROSTAR_ENUM("ris.v_perp_mode", env.v_perp_mode, kVPerp),

      AEROSTAR_DOUBLE("link.bandwidth", env.bandwidth),
      AEROSTAR_DOUBLE("link.noise_density_dbm_hz", env.noise_density_dbm_hz),
      Field{"link.noise_power_dbm",
            [](const ExperimentConfig& c) {
              return c.env.noise_power_dbm ? format_double(*c.env.noise_power_dbm) : std::string();
            },
            [](ExperimentConfig& c, const std::string& v) {
              if (trim(v).empty()) {
                c.env.noise_power_dbm.reset();
              } else {
                c.env.noise_power_dbm = parse_double(v);
              }
            }},
      AEROSTAR_DOUBLE("link.p_max_dbm", env.p_max_dbm),
      AEROSTAR_ENUM("link.power_mode", env.power_mode, kPowerMode),
      AEROSTAR_DOUBLE("link.r_qos", env.r_qos),

      AEROSTAR_DOUBLE("reward.alpha", env.reward.alpha),
      AEROSTAR_DOUBLE("reward.beta", env.reward.beta),
      AEROSTAR_DOUBLE("reward.rate_unit", env.reward.rate_unit),
      AEROSTAR_ENUM("reward.fairness", env.reward.weight, kFairness),

      AEROSTAR_ENUM("scenario.deployment", env.deployment, kDeployment),
      AEROSTAR_ENUM("scenario.ris_type", env.ris_type, kRisType),
      AEROSTAR_ENUM("scenario.stationary_power", env.stationary_power, kStationary),

      Field{"agent.kind", [](const ExperimentConfig& c) { return agents::to_string(c.agent_kind); },
            [](ExperimentConfig& c, const std::string& v) {
              try {
                c.agent_kind = agents::agent_kind_from(trim(v));
              } catch (const std::invalid_argument& e) {
                throw ConfigError(e.what());
              }
            }},
      AEROSTAR_INT("agent.hidden", agent.hidden),
      AEROSTAR_DOUBLE("agent.actor_lr", agent.actor_lr),
      AEROSTAR_DOUBLE("agent.critic_lr", agent.critic_lr),
      AEROSTAR_DOUBLE("agent.discount", agent.discount),
      AEROSTAR_DOUBLE("agent.reward_scale", agent.reward_scale),
      AEROSTAR_DOUBLE("agent.tau", agent.tau),
      AEROSTAR_INT("agent.batch_size", agent.batch_size),
      AEROSTAR_INT("agent.buffer_capacity", agent.buffer_capacity),
      AEROSTAR_DOUBLE("agent.ou_theta", agent.ou_theta),
      AEROSTAR_DOUBLE("agent.ou_sigma", agent.ou_sigma),
      AEROSTAR_DOUBLE("agent.ou_decay", agent.ou_decay),
      AEROSTAR_DOUBLE("agent.epsilon_start", agent.epsilon_start),
      AEROSTAR_DOUBLE("agent.epsilon_min", agent.epsilon_min),
      AEROSTAR_DOUBLE("agent.epsilon_decay", agent.epsilon_decay),

      AEROSTAR_INT("run.episodes", episodes),
      Field{"run.seeds", [](const ExperimentConfig& c) { return fmt_ints(c.seeds); },
            [](ExperimentConfig& c, const std::string& v) { c.seeds = parse_ints<std::uint64_t>(v); }},
      Field{"run.output_dir", [](const ExperimentConfig& c) { return c.output_dir; },
            [](ExperimentConfig& c, const std::string& v) { c.output_dir = trim(v); }},
      Field{"run.log_steps", [](const ExperimentConfig& c) { return std::string(c.log_steps ? "true" : "false"); },
            [](ExperimentConfig& c, const std::string& v) { c.log_steps = parse_bool(v); }},
      AEROSTAR_INT("run.threads", threads),
      Field{"run.checkpoint", [](const ExperimentConfig& c) { return c.checkpoint; },
            [](ExperimentConfig& c, const std::string& v) { c.checkpoint = trim(v); }},
      AEROSTAR_INT("run.eval_episodes", eval_episodes),

      Field{"sweep.areas", [](const ExperimentConfig& c) { return fmt_doubles(c.sweep.areas); },
            [](ExperimentConfig& c, const std::string& v) { c.sweep.areas = parse_doubles(v); }},
      AEROSTAR_DOUBLE("sweep.velocity_max", sweep.velocity_max),
      AEROSTAR_DOUBLE("sweep.velocity_step", sweep.velocity_step),
      Field{"sweep.elements", [](const ExperimentConfig& c) { return fmt_ints(c.sweep.elements); },
            [](ExperimentConfig& c, const std::string& v) { c.sweep.elements = parse_ints<int>(v); }},
      Field{"sweep.element_v_max", [](const ExperimentConfig& c) { return fmt_doubles(c.sweep.element_v_max); },
            [](ExperimentConfig& c, const std::string& v) { c.sweep.element_v_max = parse_doubles(v); }},
      AEROSTAR_INT("sweep.element_episodes", sweep.element_episodes),
      Field{"sweep.cv_grid", [](const ExperimentConfig& c) { return fmt_doubles(c.sweep.cv_grid); },
            [](ExperimentConfig& c, const std::string& v) { c.sweep.cv_grid = parse_doubles(v); }},
      Field{"sweep.fairness_users", [](const ExperimentConfig& c) { return fmt_ints(c.sweep.fairness_users); },
            [](ExperimentConfig& c, const std::string& v) { c.sweep.fairness_users = parse_ints<int>(v); }},
      AEROSTAR_INT("sweep.fairness_samples", sweep.fairness_samples),
      Field{"sweep.ablation_variants",
            [](const ExperimentConfig& c) {
              return join<std::string>(c.sweep.ablation_variants, [](const std::string& s) { return s; });
            },
            [](ExperimentConfig& c, const std::string& v) { c.sweep.ablation_variants = split_list(v); }},
  };
  return table;
}

#undef AEROSTAR_DOUBLE
#undef AEROSTAR_INT
#undef AEROSTAR_ENUM
#undef AEROSTAR_VEC

const Field& find_field(const std::string& key) {
  for (const auto& f : fields()) {
    if (f.key == key) return f;
  }
  throw ConfigError("unknown configuration key '" + key + "'");
}

bool perfect_square(int n) {
  const int r = static_cast<int>(std::lround(std::sqrt(static_cast<double>(n))));
  return n >= 1 && r * r == n;
}

}  // namespace

std::string format_double(double x) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), x);
  if (ec != std::errc()) throw std::runtime_error("format_double failed");
  return std::string(buf, ptr);
}

const std::vector<std::string>& ablation_variant_names() {
  static const std::vector<std::string> names{
      "traj3d",  "traj2d",      "altitude_only", "stationary",  "star_coupled", "star_independent",
      "dual_tr", "reflect_only", "reward_hfi",   "reward_jfi", "reward_none"};
  return names;
}

void ExperimentConfig::validate() const {
  try {
    env.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  if (episodes < 1) throw ConfigError("run.episodes must be >= 1");
  if (eval_episodes < 1) throw ConfigError("run.eval_episodes must be >= 1");
  if (seeds.empty()) throw ConfigError("run.seeds must list at least one seed");
  if (threads < 0) throw ConfigError("run.threads must be >= 0");
  if (agent.hidden < 0) throw ConfigError("agent.hidden must be >= 0");
  if (!(agent.actor_lr > 0.0) || !(agent.critic_lr > 0.0)) throw ConfigError("learning rates must be positive");
  if (!(agent.discount >= 0.0 && agent.discount <= 1.0)) throw ConfigError("agent.discount must lie in [0, 1]");
  if (!(agent.tau >= 0.0 && agent.tau <= 1.0)) throw ConfigError("agent.tau must lie in [0, 1]");
  if (!(agent.reward_scale > 0.0)) throw ConfigError("agent.reward_scale must be positive");
  if (agent.batch_size < 2) throw ConfigError("agent.batch_size must be >= 2");
  if (agent.buffer_capacity < agent.batch_size) throw ConfigError("agent.buffer_capacity must be >= batch_size");
  if (!(agent.ou_theta >= 0.0) || !(agent.ou_sigma >= 0.0) || !(agent.ou_decay > 0.0 && agent.ou_decay <= 1.0)) {
    throw ConfigError("invalid OU noise parameters");
  }
  const auto in_unit = [](double x) { return x >= 0.0 && x <= 1.0; };
  if (!in_unit(agent.epsilon_start) || !in_unit(agent.epsilon_min) || !(agent.epsilon_decay > 0.0 && agent.epsilon_decay <= 1.0)) {
    throw ConfigError("invalid epsilon schedule");
  }
  for (const double a : sweep.areas) {
    if (!(a >= 0.0)) throw ConfigError("sweep.areas must be non-negative");
  }
  if (!(sweep.velocity_step > 0.0) || !(sweep.velocity_max >= 0.0)) throw ConfigError("invalid velocity grid");
  for (const int n : sweep.elements) {
    if (!perfect_square(n)) throw ConfigError("sweep.elements must be perfect squares");
  }
  for (const double v : sweep.element_v_max) {
    if (!(v >= 0.0)) throw ConfigError("sweep.element_v_max must be non-negative");
  }
  if (sweep.element_episodes < 1) throw ConfigError("sweep.element_episodes must be >= 1");
  for (const double cv : sweep.cv_grid) {
    if (!(cv > 0.0)) throw ConfigError("sweep.cv_grid must be positive");
  }
  for (const int j : sweep.fairness_users) {
    if (j < 1) throw ConfigError("sweep.fairness_users must be >= 1");
  }
  if (sweep.fairness_samples < 1) throw ConfigError("sweep.fairness_samples must be >= 1");
  for (const auto& v : sweep.ablation_variants) {
    const auto& known = ablation_variant_names();
    if (std::find(known.begin(), known.end(), v) == known.end()) {
      throw ConfigError("unknown ablation variant '" + v + "'");
    }
  }
}

std::vector<std::string> config_keys() {
  std::vector<std::string> keys;
  for (const auto& f : fields()) keys.push_back(f.key);
  return keys;
}

std::string get_value(const ExperimentConfig& config, const std::string& key) {
  return find_field(key).get(config);
}

void set_value(ExperimentConfig& config, const std::string& key, const std::string& value) {
  try {
    find_field(key).set(config, value);
  } catch (const ConfigError& e) {
    throw ConfigError(key + ": " + e.what());
  }
}

std::string serialize(const ExperimentConfig& config) {
  boost::property_tree::ptree tree;
  for (const auto& f : fields()) tree.put(boost::property_tree::ptree::path_type(f.key, '.'), f.get(config));
  std::ostringstream out;
  boost::property_tree::write_ini(out, tree);
  return out.str();
}

ExperimentConfig parse_config(const std::string& text, ExperimentConfig base) {
  boost::property_tree::ptree tree;
  std::istringstream in(text);
  try {
    boost::property_tree::read_ini(in, tree);
  } catch (const boost::property_tree::ini_parser_error& e) {
    throw ConfigError(std::string("malformed configuration: ") + e.message() + " (line " +
                      std::to_string(e.line()) + ")");
  }
  for (const auto& [section, entries] : tree) {
    if (entries.empty()) {
      if (!entries.data().empty()) throw ConfigError("key '" + section + "' must sit inside a [section]");
      continue;
    }
    for (const auto& [key, value] : entries) {
      set_value(base, section + "." + key, value.get_value<std::string>());
    }
  }
  return base;
}

ExperimentConfig load_config(const std::filesystem::path& path, ExperimentConfig base) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read configuration file '" + path.string() + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str(), std::move(base));
}

nlohmann::json to_json(const ExperimentConfig& config) {
  nlohmann::json j = nlohmann::json::object();
  for (const auto& f : fields()) {
    const auto dot = f.key.find('.');
    const std::string text = f.get(config);
    nlohmann::json value = text;
    double number = 0.0;
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), number);
    if (!text.empty() && ec == std::errc() && ptr == text.data() + text.size()) value = number;
    if (text == "true" || text == "false") value = text == "true";
    j[f.key.substr(0, dot)][f.key.substr(dot + 1)] = std::move(value);
  }
  return j;
}

bool operator==(const ExperimentConfig& a, const ExperimentConfig& b) {
  for (const auto& f : fields()) {
    if (f.get(a) != f.get(b)) return false;
  }
  return true;
}

std::filesystem::path output_root() {
  const char* root = std::getenv(kOutputRootEnv);
  return root && *root ? std::filesystem::path(root) : std::filesystem::path("runs");
}

}  // namespace aerostar::harness
