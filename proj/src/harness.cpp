#include "acno/harness.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>
#include <set>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "acno/planner.hpp"

namespace acno {

using nlohmann::json;

namespace {

void reject_unknown(const json& j, const std::set<std::string>& allowed, const std::string& where) {
  if (!j.is_object()) throw std::invalid_argument(where + " must be an object");
  for (const auto& [k, v] : j.items()) {
    if (!allowed.count(k)) throw std::invalid_argument("unknown key '" + k + "' in " + where);
  }
}

template <typename T>
void read(const json& j, const char* key, T& out) {
  if (j.contains(key)) out = j.at(key).get<T>();
}

}  // namespace

std::string agent_name(AgentKind kind) {
  switch (kind) {
    case AgentKind::kDynaAtmq: return "dyna-atmq";
    case AgentKind::kAtmq: return "atmq";
    case AgentKind::kAmrl: return "amrl-q";
  }
  return "unknown";
}

AgentKind parse_agent(const std::string& name) {
  if (name == "dyna-atmq") return AgentKind::kDynaAtmq;
  if (name == "atmq") return AgentKind::kAtmq;
  if (name == "amrl-q" || name == "amrl") return AgentKind::kAmrl;
  throw std::invalid_argument("unknown agent '" + name + "' (dyna-atmq, atmq, amrl-q)");
}

std::string env_kind_name(EnvKind kind) {
  switch (kind) {
    case EnvKind::kMeasuringValue: return "measuring-value";
    case EnvKind::kFrozenLake: return "frozen-lake";
    case EnvKind::kFile: return "file";
  }
  return "unknown";
}

EnvKind parse_env_kind(const std::string& name) {
  if (name == "measuring-value") return EnvKind::kMeasuringValue;
  if (name == "frozen-lake") return EnvKind::kFrozenLake;
  if (name == "file") return EnvKind::kFile;
  throw std::invalid_argument("unknown environment '" + name + "' (measuring-value, frozen-lake, file)");
}

void ExperimentConfig::validate() const {
  if (repetitions < 1) throw std::invalid_argument("repetitions must be >= 1");
  if (episodes != 0 && eval_window > episodes) {
    throw std::invalid_argument("eval_window (" + std::to_string(eval_window) +
                                ") exceeds episodes (" + std::to_string(episodes) + ")");
  }
  if (eval_window < 1) throw std::invalid_argument("eval_window must be >= 1");
  if (threads < 1) throw std::invalid_argument("threads must be >= 1");
  if (!(env.cost >= 0.0)) throw std::invalid_argument("env.cost must be >= 0");
  if (!(env.p >= 0.0 && env.p <= 1.0)) throw std::invalid_argument("env.p must lie in [0, 1]");
  if (env.discount && !(*env.discount >= 0.0 && *env.discount <= 1.0)) {
    throw std::invalid_argument("env.discount must lie in [0, 1]");
  }
  if (env.random_size != 0 && env.random_size < 4) throw std::invalid_argument("env.random_size must be >= 4");
  if (env.kind == EnvKind::kFile && env.path.empty()) throw std::invalid_argument("env.path is required for kind 'file'");
  atmq.validate();
  amrl.validate();
}

ExperimentConfig config_from_json(const json& j) {
  ExperimentConfig c;
  try {
    reject_unknown(j, {"env", "agent", "atmq", "amrl", "episodes", "repetitions", "eval_window", "seed",
                       "step_cap", "threads"},
                   "config");
    if (j.contains("env")) {
      const json& e = j.at("env");
      reject_unknown(e, {"kind", "cost", "discount", "p", "map", "grid", "map_file", "random_size", "map_seed",
                         "frozen_prob", "variant", "path"},
                     "env");
      if (e.contains("kind")) c.env.kind = parse_env_kind(e.at("kind").get<std::string>());
      read(e, "cost", c.env.cost);
      if (e.contains("discount")) c.env.discount = e.at("discount").get<double>();
      read(e, "p", c.env.p);
      read(e, "map", c.env.map);
      read(e, "grid", c.env.grid);
      read(e, "map_file", c.env.map_file);
      read(e, "random_size", c.env.random_size);
      read(e, "map_seed", c.env.map_seed);
      read(e, "frozen_prob", c.env.frozen_prob);
      if (e.contains("variant")) c.env.variant = parse_variant(e.at("variant").get<std::string>());
      read(e, "path", c.env.path);
    }
    if (j.contains("agent")) c.agent = parse_agent(j.at("agent").get<std::string>());
    if (j.contains("atmq")) {
      const json& a = j.at("atmq");
      reject_unknown(a, {"discount", "learning_rate", "n_b", "n_opt", "n_m", "n_train", "eps_train", "reward_mode",
                         "pin_terminals", "zero_future_on_done"},
                     "atmq");
      read(a, "discount", c.atmq.discount);
      read(a, "learning_rate", c.atmq.learning_rate);
      read(a, "n_b", c.atmq.n_b);
      read(a, "n_opt", c.atmq.n_opt);
      read(a, "n_m", c.atmq.n_m);
      read(a, "n_train", c.atmq.n_train);
      read(a, "eps_train", c.atmq.eps_train);
      read(a, "pin_terminals", c.atmq.pin_terminals);
      read(a, "zero_future_on_done", c.atmq.zero_future_on_done);
      if (a.contains("reward_mode")) {
        const auto mode = a.at("reward_mode").get<std::string>();
        if (mode == "raw") {
          c.atmq.reward_mode = RewardMode::kRaw;
        } else if (mode == "scalarized") {
          c.atmq.reward_mode = RewardMode::kScalarized;
        } else {
          throw std::invalid_argument("atmq.reward_mode must be 'raw' or 'scalarized'");
        }
      }
    }
    if (j.contains("amrl")) {
      const json& a = j.at("amrl");
      reject_unknown(a, {"discount", "learning_rate", "bias", "epsilon", "greedy_tail_fraction"}, "amrl");
      read(a, "discount", c.amrl.discount);
      read(a, "learning_rate", c.amrl.learning_rate);
      read(a, "bias", c.amrl.bias);
      read(a, "epsilon", c.amrl.epsilon);
      read(a, "greedy_tail_fraction", c.amrl.greedy_tail_fraction);
    }
    read(j, "episodes", c.episodes);
    read(j, "repetitions", c.repetitions);
    read(j, "eval_window", c.eval_window);
    read(j, "seed", c.seed);
    read(j, "step_cap", c.step_cap);
    read(j, "threads", c.threads);
  } catch (const json::exception& e) {
    throw std::invalid_argument(std::string("bad config value: ") + e.what());
  }
  c.validate();
  return c;
}

json config_to_json(const ExperimentConfig& c) {
  json env = {{"kind", env_kind_name(c.env.kind)}, {"cost", c.env.cost}, {"p", c.env.p},
              {"map", c.env.map}, {"grid", c.env.grid}, {"map_file", c.env.map_file},
              {"random_size", c.env.random_size}, {"map_seed", c.env.map_seed},
              {"frozen_prob", c.env.frozen_prob}, {"variant", variant_name(c.env.variant)},
              {"path", c.env.path}};
  if (c.env.discount) env["discount"] = *c.env.discount;
  return {
      {"env", env},
      {"agent", agent_name(c.agent)},
      {"atmq",
       {{"discount", c.atmq.discount}, {"learning_rate", c.atmq.learning_rate}, {"n_b", c.atmq.n_b},
        {"n_opt", c.atmq.n_opt}, {"n_m", c.atmq.n_m}, {"n_train", c.atmq.n_train},
        {"eps_train", c.atmq.eps_train},
        {"reward_mode", c.atmq.reward_mode == RewardMode::kRaw ? "raw" : "scalarized"},
        {"pin_terminals", c.atmq.pin_terminals},
        {"zero_future_on_done", c.atmq.zero_future_on_done}}},
      {"amrl",
       {{"discount", c.amrl.discount}, {"learning_rate", c.amrl.learning_rate}, {"bias", c.amrl.bias},
        {"epsilon", c.amrl.epsilon}, {"greedy_tail_fraction", c.amrl.greedy_tail_fraction}}},
      {"episodes", c.episodes},
      {"repetitions", c.repetitions},
      {"eval_window", c.eval_window},
      {"seed", c.seed},
      {"step_cap", c.step_cap},
      {"threads", c.threads},
  };
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open config " + path.string());
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw std::invalid_argument("malformed config " + path.string() + ": " + e.what());
  }
  return config_from_json(j);
}

namespace {

std::vector<std::string> lake_grid(const EnvConfig& env) {
  if (!env.grid.empty()) return env.grid;
  if (!env.map_file.empty()) return load_map(env.map_file);
  if (env.random_size > 0) return generate_random_map(env.random_size, env.map_seed, env.frozen_prob);
  return standard_map(env.map);
}

}  // namespace

TabularAcnoMdp build_environment(const EnvConfig& env) {
  switch (env.kind) {
    case EnvKind::kMeasuringValue:
      return build_measuring_value({env.p, env.cost, env.discount.value_or(1.0)});
    case EnvKind::kFrozenLake:
      return build_frozen_lake({lake_grid(env), env.variant, env.cost, env.discount.value_or(0.95)});
    case EnvKind::kFile:
      return load_mdp(env.path);
  }
  throw std::invalid_argument("unknown environment kind");
}

std::size_t default_episodes(const EnvConfig& env) {
  if (env.kind != EnvKind::kFrozenLake) return 2500;
  const std::size_t n = lake_grid(env).size();
  return 4000 * std::max<std::size_t>(1, (n * n) / 16);
}

std::size_t default_step_cap(const EnvConfig& env) {
  if (env.kind != EnvKind::kFrozenLake) return 1000;
  return 10 * lake_grid(env).size();
}

ExperimentConfig resolved(const ExperimentConfig& config) {
  ExperimentConfig c = config;
  if (c.episodes == 0) c.episodes = default_episodes(c.env);
  if (c.step_cap == 0) c.step_cap = default_step_cap(c.env);
  if (c.agent == AgentKind::kAtmq) c.atmq.n_train = 0;
  c.validate();
  return c;
}

namespace {

std::vector<EpisodeRecord> run_repetition(const ExperimentConfig& c, const TabularAcnoMdp& env,
                                          std::size_t rep) {
  std::vector<EpisodeRecord> out;
  out.reserve(c.episodes);
  auto finish = [&](EpisodeRecord r, std::size_t e, std::uint64_t seed) {
    r.repetition = rep;
    r.episode = e;
    r.seed = seed;
    out.push_back(r);
  };
  if (c.agent == AgentKind::kAmrl) {
    AmrlAgent agent(env.state_count(), env.action_count(), env.measure_cost(), c.amrl);
    for (std::size_t e = 0; e < c.episodes; ++e) {
      const std::uint64_t seed = derive_seed(c.seed, rep, e);
      Rng rng(seed);
      finish(agent.run_episode(env, rng, e, c.episodes, c.step_cap), e, seed);
    }
  } else {
    AtmqAgent agent(env.state_count(), env.action_count(), env.r_max(), env.measure_cost(), c.atmq);
    for (std::size_t e = 0; e < c.episodes; ++e) {
      const std::uint64_t seed = derive_seed(c.seed, rep, e);
      Rng rng(seed);
      AtmqAgent::EpisodeOptions options;
      options.step_cap = c.step_cap;
      finish(agent.run_episode(env, rng, options), e, seed);
    }
  }
  return out;
}

}  // namespace

Summary summarize(const std::vector<EpisodeRecord>& records, std::size_t repetitions,
                  std::size_t episodes, std::size_t eval_window) {
  Summary s;
  s.rep_sr.assign(repetitions, 0.0);
  s.rep_measures.assign(repetitions, 0.0);
  std::size_t count = 0;
  std::size_t truncated = 0;
  for (const auto& r : records) {
    if (r.repetition >= repetitions || r.episode + eval_window < episodes) continue;
    s.rep_sr[r.repetition] += r.scalarized_return;
    s.rep_measures[r.repetition] += static_cast<double>(r.measurements);
    s.mean_raw += r.raw_return;
    truncated += r.truncated ? 1 : 0;
    ++count;
  }
  if (count == 0) return s;
  for (std::size_t i = 0; i < repetitions; ++i) {
    s.mean_sr += s.rep_sr[i];
    s.mean_measures += s.rep_measures[i];
    s.rep_sr[i] /= static_cast<double>(eval_window);
    s.rep_measures[i] /= static_cast<double>(eval_window);
  }
  const auto n = static_cast<double>(count);
  s.mean_sr /= n;
  s.mean_measures /= n;
  s.mean_raw /= n;
  s.truncated_fraction = static_cast<double>(truncated) / n;
  return s;
}

RunResult run(const ExperimentConfig& config) {
  RunResult result;
  result.config = resolved(config);
  const ExperimentConfig& c = result.config;
  const TabularAcnoMdp env = build_environment(c.env);

  std::vector<std::vector<EpisodeRecord>> per_rep(c.repetitions);
  const std::size_t workers = std::min(c.threads, c.repetitions);
  if (workers <= 1) {
    for (std::size_t rep = 0; rep < c.repetitions; ++rep) per_rep[rep] = run_repetition(c, env, rep);
  } else {
    std::vector<std::thread> pool;
    std::vector<std::exception_ptr> errors(workers);
    for (std::size_t w = 0; w < workers; ++w) {
      pool.emplace_back([&, w] {
        try {
          for (std::size_t rep = w; rep < c.repetitions; rep += workers) {
            per_rep[rep] = run_repetition(c, env, rep);
          }
        } catch (...) {
          errors[w] = std::current_exception();
        }
      });
    }
    for (auto& t : pool) t.join();
    for (auto& e : errors)
      if (e) std::rethrow_exception(e);
  }
  for (auto& recs : per_rep) result.records.insert(result.records.end(), recs.begin(), recs.end());
  result.summary = summarize(result.records, c.repetitions, c.episodes, c.eval_window);
  return result;
}

std::vector<SweepRow> sweep(const ExperimentConfig& config, const std::vector<double>& costs) {
  if (costs.empty()) throw std::invalid_argument("sweep: empty cost grid");
  std::vector<SweepRow> rows;
  for (double cost : costs) {
    ExperimentConfig c = config;
    c.env.cost = cost;
    rows.push_back({cost, run(c).summary});
  }
  return rows;
}

void write_records_csv(std::ostream& out, const std::vector<EpisodeRecord>& records) {
  out << "rep,episode,sr,raw,measures,steps,truncated\n";
  out << std::setprecision(std::numeric_limits<double>::max_digits10);
  for (const auto& r : records) {
    out << r.repetition << ',' << r.episode << ',' << r.scalarized_return << ',' << r.raw_return << ','
        << r.measurements << ',' << r.steps << ',' << (r.truncated ? 1 : 0) << '\n';
  }
}

std::vector<EpisodeRecord> read_records_csv(std::istream& in) {
  std::vector<EpisodeRecord> out;
  std::string line;
  if (!std::getline(in, line) || line != "rep,episode,sr,raw,measures,steps,truncated") {
    throw std::invalid_argument("records CSV: unexpected header");
  }
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream row(line);
    EpisodeRecord r;
    char comma = 0;
    int truncated = 0;
    if (!(row >> r.repetition >> comma >> r.episode >> comma >> r.scalarized_return >> comma >> r.raw_return >>
          comma >> r.measurements >> comma >> r.steps >> comma >> truncated)) {
      throw std::invalid_argument("records CSV: malformed row '" + line + "'");
    }
    r.truncated = truncated != 0;
    out.push_back(r);
  }
  return out;
}

json summary_to_json(const Summary& s) {
  return {{"mean_sr", s.mean_sr},
          {"mean_measures", s.mean_measures},
          {"mean_raw", s.mean_raw},
          {"truncated_fraction", s.truncated_fraction},
          {"rep_sr", s.rep_sr},
          {"rep_measures", s.rep_measures}};
}

void write_run(const RunResult& result, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  std::ofstream csv(dir / "records.csv");
  std::ofstream summary(dir / "summary.json");
  std::ofstream config(dir / "config.json");
  if (!csv || !summary || !config) throw std::runtime_error("cannot write results into " + dir.string());
  write_records_csv(csv, result.records);
  summary << summary_to_json(result.summary).dump(2) << '\n';
  config << config_to_json(result.config).dump(2) << '\n';
}

// --- verification -------------------------------------------------------------

Suite parse_suite(const std::string& name) {
  if (name == "theorem-bound") return Suite::kTheoremBound;
  if (name == "lemma-mv") return Suite::kLemmaMv;
  if (name == "oracle-equivalence") return Suite::kOracleEquivalence;
  throw std::invalid_argument("unknown suite '" + name + "' (theorem-bound, lemma-mv, oracle-equivalence)");
}

std::string suite_name(Suite suite) {
  switch (suite) {
    case Suite::kTheoremBound: return "theorem-bound";
    case Suite::kLemmaMv: return "lemma-mv";
    case Suite::kOracleEquivalence: return "oracle-equivalence";
  }
  return "unknown";
}

double oracle_gap(const TabularAcnoMdp& mdp, std::size_t samples, std::size_t dyna_steps, std::uint64_t seed) {
  AtmqConfig config;
  config.discount = mdp.discount();
  AtmqAgent agent(mdp.state_count(), mdp.action_count(), mdp.r_max(), mdp.measure_cost(), config);
  Rng rng(seed);
  for (StateId s = 0; s < mdp.state_count(); ++s) {
    if (mdp.is_terminal(s)) continue;
    for (ActionId a = 0; a < mdp.action_count(); ++a) {
      for (std::size_t i = 0; i < samples; ++i) {
        const auto [outcome, next] = step(mdp, s, {a, Measure::kObserve}, rng);
        agent.model().record_measured_transition(s, a, next, outcome.reward);
      }
    }
  }
  agent.dyna_train(dyna_steps, rng);
  const QTable oracle = value_iteration(mdp);
  double gap = 0.0;
  for (StateId s = 0; s < mdp.state_count(); ++s)
    for (ActionId a = 0; a < mdp.action_count(); ++a) gap = std::max(gap, std::abs(agent.q()(s, a) - oracle(s, a)));
  return gap;
}

VerifyReport verify(Suite suite, std::uint64_t seed, std::size_t instance_count, std::size_t horizon,
                    std::size_t psi_tables) {
  VerifyReport report;
  report.suite = suite_name(suite);
  for (std::size_t i = 0; i < instance_count; ++i) {
    VerifyRow row;
    row.instance = i;
    row.seed = derive_seed(seed, i);
    try {
      if (suite == Suite::kOracleEquivalence) {
        const TabularAcnoMdp chain = build_chain(2 + i % 3);
        row.states = chain.state_count();
        row.actions = chain.action_count();
        row.cost = chain.measure_cost();
        row.discount = chain.discount();
        row.lhs = oracle_gap(chain, 4'000'000, 200'000, row.seed);
        row.rhs = 1e-3;
        row.pass = row.lhs < row.rhs;
      } else {
        const TabularAcnoMdp mdp = random_tiny_mdp(row.seed);
        row.states = mdp.state_count();
        row.actions = mdp.action_count();
        row.cost = mdp.measure_cost();
        row.discount = mdp.discount();
        if (suite == Suite::kTheoremBound) {
          const TheoremReport t = verify_theorem_bound(mdp, horizon);
          row.lhs = t.loss;
          row.rhs = t.bound;
          row.pass = t.pass;
        } else {
          const LemmaReport l = verify_lemma_mv_optimal(mdp, horizon, psi_tables, row.seed);
          row.lhs = l.best_alternative;
          row.rhs = l.v_atm;
          row.note = std::to_string(l.alternatives) + (l.enumerated ? " tables (all)" : " tables (sampled)");
          row.pass = l.pass;
        }
      }
    } catch (const BudgetExceeded& e) {
      row.note = e.what();
      row.pass = true;
      ++report.budget_overflows;
    }
    if (!row.pass) ++report.failures;
    report.rows.push_back(row);
  }
  return report;
}

void write_verify_csv(std::ostream& out, const VerifyReport& report) {
  out << "suite,instance,seed,states,actions,cost,discount,lhs,rhs,pass,note\n";
  out << std::setprecision(std::numeric_limits<double>::max_digits10);
  for (const auto& r : report.rows) {
    out << report.suite << ',' << r.instance << ',' << r.seed << ',' << r.states << ',' << r.actions << ','
        << r.cost << ',' << r.discount << ',' << r.lhs << ',' << r.rhs << ',' << (r.pass ? 1 : 0) << ','
        << r.note << '\n';
  }
}

}  // namespace acno
