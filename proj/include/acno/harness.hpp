#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "acno/amrl_agent.hpp"
#include "acno/atmq_agent.hpp"
#include "acno/environments.hpp"
#include "acno/episode.hpp"
#include "acno/mdp.hpp"

namespace acno {

enum class EnvKind { kMeasuringValue, kFrozenLake, kFile };
enum class AgentKind { kDynaAtmq, kAtmq, kAmrl };

struct EnvConfig {
  EnvKind kind = EnvKind::kMeasuringValue;
  double cost = 0.05;
  std::optional<double> discount;  // environment discount; default 1 (MV env) or 0.95 (lake)
  double p = 0.8;                  // measuring-value env
  std::string map = "4x4";         // named map, used when grid and random_size are empty
  std::vector<std::string> grid;   // explicit map
  std::string map_file;            // ASCII map file
  int random_size = 0;             // > 0: generated n x n map
  std::uint64_t map_seed = 0;
  double frozen_prob = 0.8;
  LakeVariant variant = LakeVariant::kSemiSlippery;
  std::string path;                // JSON ACNO-MDP for kind = file
};

struct ExperimentConfig {
  EnvConfig env;
  AgentKind agent = AgentKind::kDynaAtmq;
  AtmqConfig atmq;
  AmrlConfig amrl;
  std::size_t episodes = 0;      // 0 picks a per-environment default
  std::size_t repetitions = 5;
  std::size_t eval_window = 50;
  std::uint64_t seed = 1;
  std::size_t step_cap = 0;      // 0 picks a per-environment default
  std::size_t threads = 1;

  /// Throws std::invalid_argument naming the offending field.
  void validate() const;
};

std::string agent_name(AgentKind kind);
AgentKind parse_agent(const std::string& name);
std::string env_kind_name(EnvKind kind);
EnvKind parse_env_kind(const std::string& name);

/// JSON round trip. Unknown keys are rejected so typos surface early.
ExperimentConfig config_from_json(const nlohmann::json& j);
nlohmann::json config_to_json(const ExperimentConfig& config);
ExperimentConfig load_config(const std::filesystem::path& path);

TabularAcnoMdp build_environment(const EnvConfig& env);
std::size_t default_episodes(const EnvConfig& env);
std::size_t default_step_cap(const EnvConfig& env);
/// Episodes and step cap with defaults filled in.
ExperimentConfig resolved(const ExperimentConfig& config);

struct Summary {
  double mean_sr = 0.0;        // over the eval window and all repetitions
  double mean_measures = 0.0;
  double mean_raw = 0.0;
  double truncated_fraction = 0.0;
  std::vector<double> rep_sr;  // per-repetition eval-window means
  std::vector<double> rep_measures;
};

struct RunResult {
  ExperimentConfig config;            // resolved
  std::vector<EpisodeRecord> records; // ordered by (repetition, episode)
  Summary summary;
};

/// Runs repetitions x episodes. Episode e of repetition r draws from its own
/// generator seeded with derive_seed(seed, r, e). The evaluation window is the
/// tail of training: agents keep learning through it (AMRL-Q turns greedy in
/// its own tail fraction).
RunResult run(const ExperimentConfig& config);

/// Mean SR / M / raw return over the last `eval_window` episodes of each repetition.
Summary summarize(const std::vector<EpisodeRecord>& records, std::size_t repetitions,
                  std::size_t episodes, std::size_t eval_window);

struct SweepRow {
  double cost = 0.0;
  Summary summary;
};
std::vector<SweepRow> sweep(const ExperimentConfig& config, const std::vector<double>& costs);

void write_records_csv(std::ostream& out, const std::vector<EpisodeRecord>& records);
std::vector<EpisodeRecord> read_records_csv(std::istream& in);
nlohmann::json summary_to_json(const Summary& summary);

/// Writes records.csv, summary.json and config.json into `dir`.
void write_run(const RunResult& result, const std::filesystem::path& dir);

// --- verification suites ------------------------------------------------------

struct VerifyRow {
  std::size_t instance = 0;
  std::uint64_t seed = 0;
  std::size_t states = 0;
  std::size_t actions = 0;
  double cost = 0.0;
  double discount = 0.0;
  double lhs = 0.0;   // loss, best alternative, or max |q - Q_MDP|
  double rhs = 0.0;   // bound, V(pi_ATM), or tolerance
  std::string note;
  bool pass = false;
};

struct VerifyReport {
  std::string suite;
  std::vector<VerifyRow> rows;
  std::size_t failures = 0;
  std::size_t budget_overflows = 0;
};

enum class Suite { kTheoremBound, kLemmaMv, kOracleEquivalence };
Suite parse_suite(const std::string& name);
std::string suite_name(Suite suite);

/// theorem-bound / lemma-mv: random tiny ACNO-MDPs seeded by derive_seed(seed, i).
/// oracle-equivalence: deterministic chains of 2..4 states (instance_count of them).
VerifyReport verify(Suite suite, std::uint64_t seed, std::size_t instance_count,
                    std::size_t horizon = 6, std::size_t psi_tables = 64);
void write_verify_csv(std::ostream& out, const VerifyReport& report);

/// Largest |q - Q_MDP| after training an ATMQ agent on a fully measured model
/// of `mdp` (every (s, a) recorded `samples` times from the true dynamics).
double oracle_gap(const TabularAcnoMdp& mdp, std::size_t samples, std::size_t dyna_steps,
                  std::uint64_t seed);

}  // namespace acno
