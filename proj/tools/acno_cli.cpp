// Command-line front end: run / sweep / verify / gen-map.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>

#include <CLI11.hpp>

#include "acno/environments.hpp"
#include "acno/harness.hpp"

namespace {

struct Overrides {
  std::string config;
  std::optional<std::string> env, map, map_file, variant, agent, reward_mode;
  std::optional<double> cost, p, discount, frozen_prob, learning_rate, eps_train;
  std::optional<int> random_size;
  std::optional<std::uint64_t> map_seed, seed;
  std::optional<std::size_t> episodes, repetitions, eval_window, step_cap, threads, n_train, n_b, n_m, n_opt;
  std::optional<bool> pin_terminals, zero_future_on_done;
  std::string out = "results";
};

void add_experiment_flags(CLI::App* app, Overrides& o) {
  app->add_option("--config", o.config, "JSON experiment config; flags override its fields");
  app->add_option("--env", o.env, "measuring-value | frozen-lake | file");
  app->add_option("--cost", o.cost, "measurement cost");
  app->add_option("--p", o.p, "measuring-value success probability");
  app->add_option("--discount", o.discount, "environment discount");
  app->add_option("--map", o.map, "named lake map (4x4, 8x8)");
  app->add_option("--map-file", o.map_file, "ASCII lake map");
  app->add_option("--variant", o.variant, "deterministic | semi-slippery | slippery");
  app->add_option("--random-size", o.random_size, "generate an n x n lake");
  app->add_option("--map-seed", o.map_seed, "seed for the generated lake");
  app->add_option("--frozen-prob", o.frozen_prob, "frozen-cell probability for generated lakes");
  app->add_option("--agent", o.agent, "dyna-atmq | atmq | amrl-q");
  app->add_option("--episodes", o.episodes, "episodes per repetition (0: default)");
  app->add_option("--repetitions", o.repetitions, "independent repetitions");
  app->add_option("--eval-window", o.eval_window, "trailing episodes averaged in the summary");
  app->add_option("--seed", o.seed, "base seed");
  app->add_option("--step-cap", o.step_cap, "per-episode step cap (0: default)");
  app->add_option("--threads", o.threads, "parallel repetitions");
  app->add_option("--n-train", o.n_train, "Dyna updates per step");
  app->add_option("--n-b", o.n_b, "belief particles");
  app->add_option("--n-m", o.n_m, "exploratory measurements per (s, a)");
  app->add_option("--n-opt", o.n_opt, "visits until optimism vanishes");
  app->add_option("--learning-rate", o.learning_rate, "agent learning rate");
  app->add_option("--eps-train", o.eps_train, "Dyna greedy-action probability");
  app->add_option("--reward-mode", o.reward_mode, "raw | scalarized");
  app->add_option("--pin-terminals", o.pin_terminals, "pin learned terminal values to zero (true/false)");
  app->add_option("--zero-future-on-done", o.zero_future_on_done, "drop the future term on episode-ending steps (true/false)");
  app->add_option("--out", o.out, "output directory");
}

acno::ExperimentConfig build_config(const Overrides& o) {
  acno::ExperimentConfig c = o.config.empty() ? acno::ExperimentConfig{} : acno::load_config(o.config);
  if (o.env) c.env.kind = acno::parse_env_kind(*o.env);
  if (o.cost) c.env.cost = *o.cost;
  if (o.p) c.env.p = *o.p;
  if (o.discount) c.env.discount = *o.discount;
  if (o.map) c.env.map = *o.map;
  if (o.map_file) c.env.map_file = *o.map_file;
  if (o.variant) c.env.variant = acno::parse_variant(*o.variant);
  if (o.random_size) c.env.random_size = *o.random_size;
  if (o.map_seed) c.env.map_seed = *o.map_seed;
  if (o.frozen_prob) c.env.frozen_prob = *o.frozen_prob;
  if (o.agent) c.agent = acno::parse_agent(*o.agent);
  if (o.episodes) c.episodes = *o.episodes;
  if (o.repetitions) c.repetitions = *o.repetitions;
  if (o.eval_window) c.eval_window = *o.eval_window;
  if (o.seed) c.seed = *o.seed;
  if (o.step_cap) c.step_cap = *o.step_cap;
  if (o.threads) c.threads = *o.threads;
  if (o.n_train) c.atmq.n_train = *o.n_train;
  if (o.n_b) c.atmq.n_b = *o.n_b;
  if (o.n_m) c.atmq.n_m = *o.n_m;
  if (o.n_opt) c.atmq.n_opt = *o.n_opt;
  if (o.learning_rate) {
    c.atmq.learning_rate = *o.learning_rate;
    c.amrl.learning_rate = *o.learning_rate;
  }
  if (o.eps_train) c.atmq.eps_train = *o.eps_train;
  if (o.reward_mode) {
    if (*o.reward_mode == "raw") {
      c.atmq.reward_mode = acno::RewardMode::kRaw;
    } else if (*o.reward_mode == "scalarized") {
      c.atmq.reward_mode = acno::RewardMode::kScalarized;
    } else {
      throw std::invalid_argument("--reward-mode must be raw or scalarized");
    }
  }
  if (o.pin_terminals) c.atmq.pin_terminals = *o.pin_terminals;
  if (o.zero_future_on_done) c.atmq.zero_future_on_done = *o.zero_future_on_done;
  c.validate();
  return c;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Act-then-measure agents and exact planning for ACNO-MDPs"};
  app.require_subcommand(1);

  Overrides run_opts;
  auto* run_cmd = app.add_subcommand("run", "train an agent and write records.csv / summary.json");
  add_experiment_flags(run_cmd, run_opts);

  Overrides sweep_opts;
  std::vector<double> costs;
  auto* sweep_cmd = app.add_subcommand("sweep", "run once per measurement cost");
  add_experiment_flags(sweep_cmd, sweep_opts);
  sweep_cmd->add_option("--costs", costs, "cost grid")->required()->delimiter(',');

  std::string suite;
  std::uint64_t verify_seed = 1;
  std::size_t instances = 200;
  std::size_t horizon = 6;
  std::size_t psi_tables = 64;
  std::string verify_out;
  auto* verify_cmd = app.add_subcommand("verify", "numerical verification suites");
  verify_cmd->add_option("--suite", suite, "theorem-bound | lemma-mv | oracle-equivalence")->required();
  verify_cmd->add_option("--seed", verify_seed, "base seed");
  verify_cmd->add_option("--instances", instances, "number of instances");
  verify_cmd->add_option("--horizon", horizon, "planning horizon");
  verify_cmd->add_option("--psi-tables", psi_tables, "psi tables per instance (lemma-mv)");
  verify_cmd->add_option("--out", verify_out, "CSV report path (default: stdout)");

  int map_size = 8;
  std::uint64_t map_seed = 0;
  double frozen_prob = 0.8;
  std::string map_out;
  auto* gen_cmd = app.add_subcommand("gen-map", "generate a random connected frozen-lake map");
  gen_cmd->add_option("--size", map_size, "side length n (>= 4)");
  gen_cmd->add_option("--seed", map_seed, "generator seed");
  gen_cmd->add_option("--frozen-prob", frozen_prob, "probability a cell is frozen");
  gen_cmd->add_option("--out", map_out, "output file (default: stdout)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run_cmd) {
      const auto result = acno::run(build_config(run_opts));
      acno::write_run(result, run_opts.out);
      std::printf("SR %.4f  M %.4f  raw %.4f  truncated %.4f  -> %s\n", result.summary.mean_sr,
                  result.summary.mean_measures, result.summary.mean_raw, result.summary.truncated_fraction,
                  run_opts.out.c_str());
    } else if (*sweep_cmd) {
      const auto config = build_config(sweep_opts);
      const auto rows = acno::sweep(config, costs);
      std::filesystem::create_directories(sweep_opts.out);
      std::ofstream csv(std::filesystem::path(sweep_opts.out) / "sweep.csv");
      csv << "cost,mean_sr,mean_measures,mean_raw,truncated_fraction\n";
      for (const auto& row : rows) {
        csv << row.cost << ',' << row.summary.mean_sr << ',' << row.summary.mean_measures << ','
            << row.summary.mean_raw << ',' << row.summary.truncated_fraction << '\n';
        std::printf("c=%.3f  SR %.4f  M %.4f\n", row.cost, row.summary.mean_sr, row.summary.mean_measures);
      }
      std::ofstream(std::filesystem::path(sweep_opts.out) / "config.json")
          << acno::config_to_json(acno::resolved(config)).dump(2) << '\n';
    } else if (*verify_cmd) {
      const auto report = acno::verify(acno::parse_suite(suite), verify_seed, instances, horizon, psi_tables);
      if (verify_out.empty()) {
        acno::write_verify_csv(std::cout, report);
      } else {
        std::ofstream out(verify_out);
        acno::write_verify_csv(out, report);
      }
      std::fprintf(stderr, "%s: %zu instances, %zu failures, %zu budget overflows\n", report.suite.c_str(),
                   report.rows.size(), report.failures, report.budget_overflows);
      return report.failures == 0 ? 0 : 1;
    } else if (*gen_cmd) {
      const auto grid = acno::generate_random_map(map_size, map_seed, frozen_prob);
      if (map_out.empty()) {
        std::cout << acno::format_map(grid);
      } else {
        acno::save_map(grid, map_out);
      }
    }
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  }
  return 0;
}
