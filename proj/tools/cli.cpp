#include "cli.hpp"

#include "checks.hpp"

#include "aerostar/harness/experiments.hpp"

#include <CLI11.hpp>

#include <filesystem>
#include <optional>
#include <unistd.h>

namespace aerostar::cli {

namespace {

using harness::ConfigError;
using harness::ExperimentConfig;

struct CommonOptions {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::vector<std::uint64_t> seeds;
  std::optional<int> episodes;
  std::optional<std::string> agent;
  std::optional<std::string> out_dir;
  std::optional<int> threads;
  std::vector<std::string> overrides;  // key=value
};

void add_common(CLI::App* cmd, CommonOptions& o) {
  cmd->add_option("--config", o.config_path, "INI configuration file")->check(CLI::ExistingFile);
  cmd->add_option("--seed", o.seed, "single master seed (replaces run.seeds)");
  cmd->add_option("--seeds", o.seeds, "several master seeds")->delimiter(',');
  cmd->add_option("--episodes", o.episodes, "episodes per seed");
  cmd->add_option("--agent", o.agent, "daddpg, ddpg, dqn or random");
  cmd->add_option("--out", o.out_dir, "output directory (default: $AEROSTAR_OUTPUT_ROOT/<verb>)");
  cmd->add_option("--threads", o.threads, "worker threads, 0 = all cores");
  cmd->add_option("--set", o.overrides, "override any key, e.g. --set channel.ris_elements=4");
}

// Defaults, then the file, then flags.
ExperimentConfig build_config(const CommonOptions& o) {
  ExperimentConfig config;
  if (!o.config_path.empty()) config = harness::load_config(o.config_path, config);
  for (const auto& kv : o.overrides) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos) throw ConfigError("--set expects key=value, got '" + kv + "'");
    harness::set_value(config, kv.substr(0, eq), kv.substr(eq + 1));
  }
  if (!o.seeds.empty()) config.seeds = o.seeds;
  if (o.seed) config.seeds = {*o.seed};
  if (o.episodes) config.episodes = *o.episodes;
  if (o.agent) harness::set_value(config, "agent.kind", *o.agent);
  if (o.out_dir) config.output_dir = *o.out_dir;
  if (o.threads) config.threads = *o.threads;
  config.validate();
  return config;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"UAV-mounted STAR-RIS downlink simulator and learning agents"};
  app.name("aerostar");
  app.require_subcommand(1);
  app.set_help_all_flag("--help-all", "help for every verb");

  CommonOptions opts;
  auto* train = app.add_subcommand("train", "train an agent on every seed");
  auto* sweep_velocity = app.add_subcommand("sweep-velocity", "level-flight power over panel areas and speeds");
  auto* sweep_elements = app.add_subcommand("sweep-elements", "heuristic-policy efficiency over N and V_max");
  auto* sweep_fairness = app.add_subcommand("sweep-fairness", "HFI and JFI of lognormal rates over CV");
  auto* ablate = app.add_subcommand("ablate", "train each deployment / surface / reward variant");
  auto* eval = app.add_subcommand("eval", "greedy rollouts from a checkpoint");
  auto* show = app.add_subcommand("show-config", "print the effective configuration");
  auto* selftest = app.add_subcommand("selftest", "run the oracle and invariant checks");

  for (auto* cmd : {train, sweep_velocity, sweep_elements, sweep_fairness, ablate, eval, show}) add_common(cmd, opts);
  std::vector<std::string> variants;
  ablate->add_option("--variants", variants, "variant names")->delimiter(',');
  std::string checkpoint;
  eval->add_option("--checkpoint", checkpoint, "checkpoint JSON written by train");
  bool as_json = false;
  show->add_flag("--json", as_json, "JSON instead of INI");
  bool full = false;
  selftest->add_flag("--full", full, "include the multi-seed learning comparison (slow)");

  std::vector<std::string> reversed(args.rbegin(), args.rend() - 1);
  try {
    app.parse(std::move(reversed));
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return kOk;
  } catch (const CLI::CallForAllHelp& e) {
    out << app.help("", CLI::AppFormatMode::All);
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kConfigError;
  }

  try {
    if (selftest->parsed()) {
      using namespace acceptance;
      std::vector<Check> checks = fast_checks();
      if (full) {
        for (auto& c : learning_checks()) checks.push_back(std::move(c));
      }
      const auto scratch =
          std::filesystem::temp_directory_path() / ("aerostar-selftest-" + std::to_string(::getpid()));
      const int failures = run_checks(checks, scratch, out);
      std::error_code ec;
      std::filesystem::remove_all(scratch, ec);
      return failures == 0 ? kOk : kSelftestFailure;
    }

    ExperimentConfig config = build_config(opts);
    if (show->parsed()) {
      out << (as_json ? harness::to_json(config).dump(2) + "\n" : harness::serialize(config));
      return kOk;
    }
    if (train->parsed()) {
      const auto dir = harness::resolve_output_dir(config, "train");
      const auto result = harness::run_training(config, dir);
      for (const auto& s : result.seeds) {
        out << "seed " << s.seed << ": first-50 mean return " << s.first50_mean << ", last-50 " << s.last50_mean
            << " -> " << s.metrics_csv.string() << "\n";
      }
      out << "summary: " << result.summary_json.string() << "\n";
    } else if (sweep_velocity->parsed()) {
      const auto dir = harness::resolve_output_dir(config, "sweep-velocity");
      for (const auto& r : harness::run_velocity_area_sweep(config, dir)) {
        if (r.argmin) out << "area " << r.area << " m^2: minimum " << r.total_power << " W at " << r.velocity << " m/s\n";
      }
      out << "wrote " << (dir / "velocity_area.csv").string() << "\n";
    } else if (sweep_elements->parsed()) {
      const auto dir = harness::resolve_output_dir(config, "sweep-elements");
      for (const auto& r : harness::run_elements_sweep(config, dir)) {
        out << "N " << r.elements << ", V_max " << r.v_max << ": " << r.mean_efficiency << " bit/J\n";
      }
      out << "wrote " << (dir / "elements.csv").string() << "\n";
    } else if (sweep_fairness->parsed()) {
      const auto dir = harness::resolve_output_dir(config, "sweep-fairness");
      harness::run_fairness_sweep(config, dir);
      out << "wrote " << (dir / "fairness.csv").string() << "\n";
    } else if (ablate->parsed()) {
      if (!variants.empty()) {
        config.sweep.ablation_variants = variants;
        config.validate();
      }
      const auto dir = harness::resolve_output_dir(config, "ablate");
      for (const auto& r : harness::run_ablation(config, dir)) {
        out << r.variant << " seed " << r.seed << ": last-50 mean return " << r.last50_mean << "\n";
      }
      out << "wrote " << (dir / "ablation.csv").string() << "\n";
    } else if (eval->parsed()) {
      if (!checkpoint.empty()) config.checkpoint = checkpoint;
      const auto dir = harness::resolve_output_dir(config, "eval");
      const auto result = harness::run_eval(config, dir);
      out << "mean return " << result.mean_return << " over " << result.episode_returns.size() << " episodes -> "
          << result.metrics_csv.string() << "\n";
    }
    return kOk;
  } catch (const ConfigError& e) {
    err << "configuration error: " << e.what() << "\n";
    return kConfigError;
  } catch (const std::exception& e) {
    err << "runtime failure: " << e.what() << "\n";
    return kRuntimeFailure;
  }
}

}  // namespace aerostar::cli
