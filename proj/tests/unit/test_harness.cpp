#include <doctest.h>

#include <filesystem>
#include <sstream>

#include "acno/harness.hpp"

using namespace acno;

TEST_CASE("names round trip") {
  for (auto a : {AgentKind::kDynaAtmq, AgentKind::kAtmq, AgentKind::kAmrl}) CHECK(parse_agent(agent_name(a)) == a);
  for (auto e : {EnvKind::kMeasuringValue, EnvKind::kFrozenLake, EnvKind::kFile})
    CHECK(parse_env_kind(env_kind_name(e)) == e);
  CHECK_THROWS_AS(parse_agent("sarsa"), std::invalid_argument);
  for (auto s : {Suite::kTheoremBound, Suite::kLemmaMv, Suite::kOracleEquivalence}) CHECK(parse_suite(suite_name(s)) == s);
}

TEST_CASE("config JSON round trip and validation") {
  ExperimentConfig c;
  c.agent = AgentKind::kAmrl;
  c.env.kind = EnvKind::kFrozenLake;
  c.env.variant = LakeVariant::kSlippery;
  c.env.discount = 0.9;
  c.atmq.n_train = 7;
  c.atmq.reward_mode = RewardMode::kScalarized;
  c.seed = 99;
  const auto back = config_from_json(config_to_json(c));
  CHECK(config_to_json(back) == config_to_json(c));
  CHECK_THROWS_AS(config_from_json(nlohmann::json::parse(R"({"episods": 3})")), std::invalid_argument);
  CHECK_THROWS_AS(config_from_json(nlohmann::json::parse(R"({"episodes": 10, "eval_window": 20})")),
                  std::invalid_argument);
  CHECK_THROWS_AS(config_from_json(nlohmann::json::parse(R"({"env": {"cost": -1}})")), std::invalid_argument);
  CHECK_THROWS_AS(config_from_json(nlohmann::json::parse(R"({"seed": "x"})")), std::invalid_argument);
}

TEST_CASE("defaults resolve per environment") {
  ExperimentConfig c;
  const auto mv = resolved(c);
  CHECK(mv.step_cap == 1000);
  CHECK(mv.episodes > 0);
  c.env.kind = EnvKind::kFrozenLake;
  CHECK(resolved(c).step_cap == 40);
  c.agent = AgentKind::kAtmq;
  CHECK(resolved(c).atmq.n_train == 0);
  CHECK(build_environment(c.env).discount() == doctest::Approx(0.95));
}

TEST_CASE("runs are deterministic in the seed") {
  ExperimentConfig c;
  c.episodes = 60;
  c.eval_window = 10;
  c.repetitions = 2;
  c.threads = 2;
  const auto a = run(c);
  const auto b = run(c);
  std::ostringstream sa, sb;
  write_records_csv(sa, a.records);
  write_records_csv(sb, b.records);
  CHECK(sa.str() == sb.str());
  CHECK(a.records.size() == 120);
  std::istringstream in(sa.str());
  auto expected = a.records;
  for (auto& r : expected) r.seed = 0;  // not part of the CSV
  CHECK(read_records_csv(in) == expected);
}

TEST_CASE("summary averages the evaluation window") {
  std::vector<EpisodeRecord> recs;
  for (std::size_t r = 0; r < 2; ++r)
    for (std::size_t e = 0; e < 4; ++e) {
      EpisodeRecord x;
      x.repetition = r;
      x.episode = e;
      x.scalarized_return = e >= 2 ? 1.0 + r : 0.0;
      x.measurements = e;
      recs.push_back(x);
    }
  const auto s = summarize(recs, 2, 4, 2);
  CHECK(s.mean_sr == doctest::Approx(1.5));
  CHECK(s.mean_measures == doctest::Approx(2.5));
  CHECK(s.rep_sr.size() == 2);
}

TEST_CASE("write_run produces the three files") {
  ExperimentConfig c;
  c.agent = AgentKind::kAmrl;
  c.episodes = 20;
  c.eval_window = 5;
  c.repetitions = 1;
  const auto dir = std::filesystem::temp_directory_path() / "acno_run_test";
  std::filesystem::remove_all(dir);
  write_run(run(c), dir);
  CHECK(std::filesystem::exists(dir / "records.csv"));
  CHECK(std::filesystem::exists(dir / "summary.json"));
  CHECK(std::filesystem::exists(dir / "config.json"));
  CHECK(load_config(dir / "config.json").agent == AgentKind::kAmrl);
  std::filesystem::remove_all(dir);
}

TEST_CASE("large costs switch measuring off") {
  ExperimentConfig c;
  c.episodes = 400;
  c.repetitions = 1;
  const auto rows = sweep(c, {0.6});
  CHECK(rows.front().summary.mean_measures == 0.0);
}

TEST_CASE("verification suites on small counts") {
  CHECK(verify(Suite::kTheoremBound, 1, 5).failures == 0);
  CHECK(verify(Suite::kLemmaMv, 1, 3, 5, 32).failures == 0);
  std::ostringstream out;
  write_verify_csv(out, verify(Suite::kTheoremBound, 2, 2));
  CHECK(out.str().find("instance") != std::string::npos);
}
