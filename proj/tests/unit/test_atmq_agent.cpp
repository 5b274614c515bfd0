#include <doctest.h>

#include "acno/atmq_agent.hpp"
#include "acno/environments.hpp"
#include "acno/planner.hpp"

using namespace acno;

namespace {

// Fig. 3 style values: a0 pays in s0, a1 pays in s1.
double fig3_value(StateId s, ActionId a) { return (s == 0) == (a == 0) ? 1.0 : 0.0; }

AtmqAgent fresh(std::size_t S, std::size_t A, double cost = 0.05, AtmqConfig cfg = {}) {
  return AtmqAgent(S, A, 1.0, cost, cfg);
}

}  // namespace

TEST_CASE("greedy control action on a belief") {
  Rng rng(1);
  auto q = [](StateId, ActionId a) { return a == 1 ? 1.0 : 0.0; };
  CHECK(greedy_control_action(q, 2, Belief::collapse(0), rng) == 1);
  const auto b = Belief::from_dense({0.8, 0.2});
  CHECK(greedy_control_action(fig3_value, 2, b, rng) == 0);
}

TEST_CASE("greedy ties are broken uniformly") {
  Rng rng(7);
  auto flat = [](StateId, ActionId) { return 0.5; };
  int ones = 0;
  for (int i = 0; i < 10000; ++i) ones += greedy_control_action(flat, 2, Belief::collapse(0), rng) == 1;
  CHECK(ones / 10000.0 == doctest::Approx(0.5).epsilon(0.05));
}

TEST_CASE("measuring value") {
  const auto b = Belief::from_dense({0.8, 0.2});
  CHECK(measuring_value(b, fig3_value, 2, 1.0, 0.1) == doctest::Approx(0.1));
  CHECK(measuring_value(b, fig3_value, 2, 1.0, 0.0) == doctest::Approx(0.2));
  CHECK(measuring_value(Belief::collapse(1), fig3_value, 2, 1.0, 0.3) == doctest::Approx(-0.3));
  auto arbitrary = [](StateId s, ActionId a) { return 0.37 * s - 0.11 * a * a + 0.05 * s * a; };
  const auto wide = Belief::from_dense({0.1, 0.4, 0.2, 0.3});
  CHECK(measuring_value(wide, arbitrary, 3, 0.9, 0.0) >= 0.0);
}

TEST_CASE("measurement decisions") {
  auto agent = fresh(2, 2, 0.1);
  // Exploratory branch: certain state, unvisited pair.
  CHECK(agent.decide_measurement(Belief::collapse(0), 0, Belief::from_dense({0.5, 0.5})) ==
        Measure::kObserve);
  for (int i = 0; i < 19; ++i) agent.model().record_measured_transition(0, 0, 1, 0.0);
  // Exploration budget used up; point-mass prediction means MV = -c.
  CHECK(agent.decide_measurement(Belief::collapse(0), 0, Belief::collapse(1)) == Measure::kSkip);
  // Fig. 3 values with c = 0.1: MV = 0.95 * 0.2 - 0.1 > 0.
  agent.q()(0, 0) = 1.0;
  agent.q()(1, 1) = 1.0;
  CHECK(agent.decide_measurement(Belief::collapse(0), 0, Belief::from_dense({0.8, 0.2})) ==
        Measure::kObserve);
}

TEST_CASE("bonus shrinks linearly with visits") {
  AtmqConfig cfg;
  cfg.n_opt = 20;
  auto agent = fresh(2, 1, 0.05, cfg);
  CHECK(agent.bonus(0, 0) == doctest::Approx(19.0 / 20));
  for (int i = 0; i < 9; ++i) agent.model().record_measured_transition(0, 0, 1, 0.0);
  CHECK(agent.bonus(0, 0) == doctest::Approx(10.0 / 20));
  for (int i = 0; i < 15; ++i) agent.model().record_measured_transition(0, 0, 1, 0.0);
  CHECK(agent.bonus(0, 0) == 0.0);
}

TEST_CASE("q_update weights the learning rate by belief mass") {
  AtmqConfig cfg;
  cfg.n_opt = 0;
  auto agent = fresh(3, 1, 0.05, cfg);
  agent.q()(2, 0) = 0.7;
  agent.q_update(Belief::collapse(0), 0, 1.0);
  CHECK(agent.q()(2, 0) == 0.7);  // b(2) = 0
  CHECK(agent.q()(0, 0) != 0.0);
}

TEST_CASE("q_update with eta = 1 to a known terminal gives the reward") {
  AtmqConfig cfg;
  cfg.learning_rate = 1.0;
  cfg.n_opt = 0;
  auto agent = fresh(2, 1, 0.05, cfg);
  for (int i = 0; i < 1000000; ++i) agent.model().record_measured_transition(0, 0, 1, 0.4);
  agent.mark_terminal(1);
  agent.q()(1, 0) = 5.0;
  agent.q_update(Belief::collapse(0), 0, 0.4);
  CHECK(agent.q()(0, 0) == doctest::Approx(0.4));
}

TEST_CASE("Dyna training reaches the value-iteration fixed point on a 2-state chain") {
  const auto env = build_chain(2);
  AtmqConfig cfg;
  cfg.n_opt = 0;
  auto agent = fresh(2, 2, 0.05, cfg);
  Rng rng(3);
  for (StateId s = 0; s < 2; ++s)
    for (ActionId a = 0; a < 2; ++a)
      for (int i = 0; i < 4000000; ++i) {
        const StateId next = a == 0 ? std::min<StateId>(s + 1, 1) : 0;
        agent.model().record_measured_transition(s, a, next, env.reward(s, a));
      }
  agent.dyna_train(200000, rng);
  const auto oracle = value_iteration(env);
  for (StateId s = 0; s < 2; ++s)
    for (ActionId a = 0; a < 2; ++a) CHECK(std::abs(agent.q()(s, a) - oracle(s, a)) < 1e-3);
}

TEST_CASE("episodes on the measuring-value env") {
  const auto env = build_measuring_value({0.8, 0.05, 1.0});
  auto agent = fresh(4, 2, 0.05);
  AtmqAgent::EpisodeOptions opts;
  Rng rng(9);
  const auto rec = agent.run_episode(env, rng, opts);
  CHECK(rec.steps >= 2);
  CHECK(rec.scalarized_return == doctest::Approx(rec.raw_return - 0.05 * rec.measurements));
  auto wrong = fresh(3, 2, 0.05);
  CHECK_THROWS_AS(wrong.run_episode(env, rng, opts), std::invalid_argument);
}

TEST_CASE("step cap truncates") {
  const auto env = build_chain(3);
  auto agent = fresh(3, 2, 0.05);
  AtmqAgent::EpisodeOptions opts;
  opts.step_cap = 17;
  Rng rng(1);
  const auto rec = agent.run_episode(env, rng, opts);
  CHECK(rec.truncated);
  CHECK(rec.steps == 17);
}

TEST_CASE("Dyna-ATMQ learns the deterministic lake path") {
  FrozenLakeSpec spec{standard_map("4x4"), LakeVariant::kDeterministic, 0.05, 0.95};
  const auto env = build_frozen_lake(spec);
  auto agent = fresh(16, 4, 0.05);
  AtmqAgent::EpisodeOptions opts;
  opts.step_cap = 40;
  double raw = 0.0;
  for (int e = 0; e < 2000; ++e) {
    Rng rng(derive_seed(4, 0, e));
    const auto rec = agent.run_episode(env, rng, opts);
    if (e >= 1950) raw += rec.raw_return;
  }
  CHECK(raw / 50 >= 0.9);
}

TEST_CASE("checkpoint round trip") {
  auto agent = fresh(3, 2, 0.1);
  agent.q()(1, 1) = 0.123456789012345;
  agent.model().record_measured_transition(1, 1, 2, 0.5);
  agent.mark_terminal(2);
  const auto back = AtmqAgent::deserialize(agent.serialize(), agent.config());
  CHECK(back.q()(1, 1) == agent.q()(1, 1));
  CHECK(back.known_terminal(2));
  CHECK(back.model() == agent.model());
  CHECK_THROWS_AS(AtmqAgent::deserialize("bogus", {}), std::invalid_argument);
}

TEST_CASE("config validation") {
  AtmqConfig cfg;
  cfg.learning_rate = 0.0;
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
  cfg = {};
  cfg.n_b = 0;
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
}

TEST_CASE("episode-ending updates ignore the model's future") {
  AtmqConfig cfg;
  cfg.learning_rate = 1.0;
  auto agent = fresh(3, 1, 0.05, cfg);
  agent.q()(1, 0) = 0.9;
  agent.q()(2, 0) = 0.9;
  agent.q_update(Belief::collapse(0), 0, 0.0, true);
  CHECK(agent.q()(0, 0) == 0.0);
  agent.q_update(Belief::collapse(0), 0, 0.0, false);
  CHECK(agent.q()(0, 0) > 0.5);
}

TEST_CASE("bonus stays zero past N_opt even when q exceeds R_max") {
  auto agent = fresh(2, 1);
  for (int i = 0; i < 40; ++i) agent.model().record_measured_transition(0, 0, 1, 0.0);
  agent.q()(0, 0) = 15.0;
  CHECK(agent.bonus(0, 0) == 0.0);
  CHECK(agent.optimistic_value(0, 0) == 15.0);
}
