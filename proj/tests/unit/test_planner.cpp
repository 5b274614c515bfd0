#include <doctest.h>

#include <cmath>

#include "acno/environments.hpp"
#include "acno/planner.hpp"

using namespace acno;

namespace {

// Plain finite-horizon DP over the measuring-value env under full observability.
double mv_full_information(double p, int horizon) {
  double v_start = 0.0, v_plus = 0.0, v_minus = 0.0;
  for (int k = 0; k < horizon; ++k) {
    const double start = std::max(v_start, p * v_plus + (1 - p) * v_minus);
    const double plus = std::max(v_start, 1.0);
    const double minus = std::max(v_start, 0.0);
    v_start = start;
    v_plus = plus;
    v_minus = minus;
  }
  return v_start;
}

}  // namespace

TEST_CASE("value iteration: single self-loop") {
  MdpData d;
  d.state_count = 1;
  d.action_count = 1;
  d.transition = {1.0};
  d.reward = {1.0};
  d.discount = 0.95;
  const auto q = value_iteration(TabularAcnoMdp(d));
  CHECK(q(0, 0) == doctest::Approx(20.0).epsilon(1e-8));
}

TEST_CASE("value iteration on the deterministic lake matches shortest paths") {
  FrozenLakeSpec spec{standard_map("4x4"), LakeVariant::kDeterministic, 0.05, 0.95};
  const auto env = build_frozen_lake(spec);
  const auto q = value_iteration(env);
  const int d = lake_shortest_path(spec.grid);
  CHECK(q.max(0) == doctest::Approx(std::pow(0.95, d - 1)));
}

TEST_CASE("finite-horizon Q on the measuring-value env") {
  const auto env = build_measuring_value({0.8, 0.1, 1.0});
  const auto qs = finite_horizon_q(env, 50);
  CHECK(qs.size() == 51);
  CHECK(qs[0].max(0) == 0.0);
  CHECK(qs[50].max(0) == doctest::Approx(mv_full_information(0.8, 50)).epsilon(1e-12));
  CHECK(qs[50].max(0) == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("exact evaluation matches the series on the measuring-value env") {
  const auto env = build_measuring_value({0.8, 0.1, 1.0});
  const ExactPlanner planner(env, 100);
  CHECK(planner.evaluate(PolicySpec::measuring_value()).value ==
        doctest::Approx(analytic_measuring_return(0.8, 0.1, 1.0, 200)).epsilon(1e-9));
  CHECK(planner.evaluate(PolicySpec::never()).value == doctest::Approx(0.8).epsilon(1e-9));
}

TEST_CASE("brute-force optimum on the measuring-value env") {
  const ExactPlanner cheap(build_measuring_value({0.8, 0.1, 1.0}), 60);
  CHECK(cheap.optimal().value == doctest::Approx(0.875).epsilon(1e-6));
  const ExactPlanner dear(build_measuring_value({0.8, 0.2, 1.0}), 60);
  CHECK(dear.optimal().value == doctest::Approx(0.8).epsilon(1e-9));
}

TEST_CASE("optimum dominates every fixed rule") {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const auto mdp = random_tiny_mdp(seed);
    const ExactPlanner planner(mdp, 5);
    const double best = planner.optimal().value;
    for (const auto& policy : {PolicySpec::measuring_value(), PolicySpec::always(), PolicySpec::never(),
                               PolicySpec::approx_mv()}) {
      CHECK(best >= planner.evaluate(policy).value - 1e-9);
    }
  }
}

TEST_CASE("deterministic env: optimum needs no measurement") {
  FrozenLakeSpec spec{standard_map("4x4"), LakeVariant::kDeterministic, 0.05, 0.95};
  const ExactPlanner planner(build_frozen_lake(spec), 8);
  const double never = planner.evaluate(PolicySpec::never()).value;
  CHECK(planner.optimal().value == doctest::Approx(never).epsilon(1e-12));
  CHECK(never == doctest::Approx(std::pow(0.95, 5)));
}

TEST_CASE("zero cost: always measuring is optimal") {
  for (std::uint64_t seed = 100; seed < 110; ++seed) {
    const auto mdp = random_tiny_mdp(seed).with_cost(0.0);
    const ExactPlanner planner(mdp, 5);
    CHECK(planner.optimal().value == doctest::Approx(planner.evaluate(PolicySpec::always()).value).epsilon(1e-9));
  }
}

TEST_CASE("heuristic failure example") {
  SUBCASE("control goes to the b-branch") {
    const ExactPlanner planner(build_fig4_example(0.1), 20);
    CHECK(planner.atm_control(planner.initial_belief(), 20) == fig4::kB);
  }
  SUBCASE("finite-horizon loss identity") {
    const double c = 0.1, eps = 1e-9, g = 0.95;
    const std::size_t H = 20;
    const auto report = verify_theorem_bound(build_fig4_example(c, eps, g), H);
    double expected = 0.0;
    for (std::size_t t = 0; t + 1 < H; ++t) expected += c * std::pow(g, t);
    for (std::size_t t = 1; t < H; ++t) expected -= eps * std::pow(g, t);
    CHECK(report.loss == doctest::Approx(expected).epsilon(1e-9));
    CHECK(report.pass);
  }
  SUBCASE("zero cost, zero loss") {
    const auto report = verify_theorem_bound(build_fig4_example(0.0), 12);
    CHECK(std::abs(report.loss) < 1e-9);
  }
}

TEST_CASE("theorem bound on random instances") {
  for (std::uint64_t seed = 0; seed < 30; ++seed) {
    const auto report = verify_theorem_bound(random_tiny_mdp(derive_seed(77, seed)), 6);
    CHECK(report.pass);
    CHECK(report.v_star >= report.v_atm - 1e-9);
  }
}

TEST_CASE("measuring-value rule beats the simple alternatives") {
  const ExactPlanner planner(build_measuring_value({0.8, 0.1, 1.0}), 60);
  const double mv = planner.evaluate(PolicySpec::measuring_value()).value;
  CHECK(mv >= planner.evaluate(PolicySpec::always()).value - 1e-9);
  CHECK(mv >= planner.evaluate(PolicySpec::never()).value - 1e-9);
  const ExactPlanner dear(build_measuring_value({0.8, 0.3, 1.0}), 60);
  CHECK(dear.evaluate(PolicySpec::measuring_value()).value ==
        doctest::Approx(dear.evaluate(PolicySpec::never()).value));
}

TEST_CASE("lemma suite on a few instances") {
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const auto report = verify_lemma_mv_optimal(random_tiny_mdp(derive_seed(3, seed)), 5, 64, seed);
    CHECK(report.pass);
    CHECK(report.alternatives >= std::min<std::size_t>(64, std::size_t{1} << std::min<std::size_t>(report.reachable, 20)));
  }
}

TEST_CASE("successor split") {
  const auto env = build_measuring_value({0.8, 0.1, 1.0});
  const auto split = split_successors(env, Belief::from_dense({0, 0.5, 0.5, 0}), mv_env::kAdvance);
  CHECK(split.terminal_mass == doctest::Approx(1.0));
  CHECK(split.continuing.empty());
}

TEST_CASE("node budget") {
  const ExactPlanner tiny(build_measuring_value({0.8, 0.1, 1.0}), 60, 3);
  CHECK_THROWS_AS(tiny.evaluate(PolicySpec::measuring_value()), BudgetExceeded);
}

TEST_CASE("random tiny MDPs are reproducible and small") {
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    const auto a = random_tiny_mdp(seed);
    CHECK(a.state_count() <= 4);
    CHECK(a.action_count() <= 2);
    CHECK(format_mdp(a) == format_mdp(random_tiny_mdp(seed)));
  }
}
