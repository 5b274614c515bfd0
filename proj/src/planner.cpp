#include "acno/planner.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>

namespace acno {

namespace {

using MassKey = std::vector<std::pair<StateId, long long>>;

MassKey mass_key(const Belief& b) {
  MassKey out;
  out.reserve(b.size());
  for (const auto& [s, w] : b.support()) out.push_back({s, std::llround(w * 1e12)});
  return out;
}

double future_value(const QTable& q, const TabularAcnoMdp& mdp, StateId s) {
  return mdp.is_terminal(s) ? 0.0 : q.max(s);
}

}  // namespace

QTable value_iteration(const TabularAcnoMdp& mdp, double tol, std::size_t max_iterations) {
  const std::size_t S = mdp.state_count();
  const std::size_t A = mdp.action_count();
  QTable q(S, A, 0.0);
  std::vector<double> v(S, 0.0);
  for (std::size_t it = 0; it < max_iterations; ++it) {
    double residual = 0.0;
    QTable next(S, A, 0.0);
    for (StateId s = 0; s < S; ++s) {
      if (mdp.is_terminal(s)) continue;
      for (ActionId a = 0; a < A; ++a) {
        double total = mdp.reward(s, a);
        const auto row = mdp.transition_row(s, a);
        for (StateId n = 0; n < S; ++n) total += mdp.discount() * row[n] * v[n];
        next(s, a) = total;
        residual = std::max(residual, std::abs(total - q(s, a)));
      }
    }
    q = std::move(next);
    for (StateId s = 0; s < S; ++s) v[s] = future_value(q, mdp, s);
    if (residual < tol) return q;
  }
  throw std::runtime_error("value_iteration: no convergence within the iteration cap");
}

std::vector<QTable> finite_horizon_q(const TabularAcnoMdp& mdp, std::size_t horizon) {
  const std::size_t S = mdp.state_count();
  const std::size_t A = mdp.action_count();
  std::vector<QTable> out;
  out.reserve(horizon + 1);
  out.emplace_back(S, A, 0.0);
  for (std::size_t k = 1; k <= horizon; ++k) {
    const QTable& prev = out.back();
    QTable q(S, A, 0.0);
    for (StateId s = 0; s < S; ++s) {
      if (mdp.is_terminal(s)) continue;
      for (ActionId a = 0; a < A; ++a) {
        double total = mdp.reward(s, a);
        const auto row = mdp.transition_row(s, a);
        for (StateId n = 0; n < S; ++n) {
          if (row[n] > 0.0) total += mdp.discount() * row[n] * future_value(prev, mdp, n);
        }
        q(s, a) = total;
      }
    }
    out.push_back(std::move(q));
  }
  return out;
}

Successors split_successors(const TabularAcnoMdp& mdp, const Belief& b, ActionId a) {
  Successors out;
  out.next = pushforward(mdp, b, a);
  std::vector<Belief::Entry> live;
  double live_mass = 0.0;
  for (StateId s = 0; s < out.next.size(); ++s) {
    if (out.next[s] <= 0.0) continue;
    if (mdp.is_terminal(s)) {
      out.terminal_mass += out.next[s];
    } else {
      live.push_back({s, out.next[s]});
      live_mass += out.next[s];
    }
  }
  if (live_mass > 1e-15) {
    for (auto& e : live) e.second /= live_mass;
    out.continuing = Belief::from_entries(std::move(live));
  }
  out.terminal_mass = 1.0 - live_mass;
  return out;
}

ExactPlanner::ExactPlanner(const TabularAcnoMdp& mdp, std::size_t horizon, std::size_t node_budget)
    : mdp_(mdp), horizon_(horizon), node_budget_(node_budget), qmdp_(finite_horizon_q(mdp, horizon)) {}

Belief ExactPlanner::initial_belief() const {
  return Belief::from_dense(mdp_.initial_distribution());
}

ExactPlanner::Key ExactPlanner::key(const Belief& b, std::size_t steps) {
  return {steps, mass_key(b)};
}

ActionId ExactPlanner::atm_control(const Belief& b, std::size_t steps_to_go) const {
  const QTable& q = qmdp_.at(steps_to_go);
  ActionId best_action = 0;
  double best = -std::numeric_limits<double>::infinity();
  for (ActionId a = 0; a < mdp_.action_count(); ++a) {
    double score = 0.0;
    for (const auto& [s, w] : b.support()) score += w * q(s, a);
    if (score > best) {
      best = score;
      best_action = a;
    }
  }
  return best_action;
}

void ExactPlanner::check_budget(const Memo& memo) const {
  if (memo.size() > node_budget_) {
    throw BudgetExceeded("belief tree exceeded the node budget of " + std::to_string(node_budget_));
  }
}

Evaluation ExactPlanner::finish(double value, const Memo& memo) const {
  Evaluation e;
  e.value = value;
  e.nodes = memo.size();
  const double g = mdp_.discount();
  e.truncation_bound = g < 1.0 ? std::pow(g, static_cast<double>(horizon_)) * std::abs(mdp_.r_max()) / (1.0 - g)
                               : std::numeric_limits<double>::infinity();
  return e;
}

// Expected value of the terminal-split root: terminal initial states are
// worth nothing.
static double root_value(const TabularAcnoMdp& mdp, const std::function<double(const Belief&)>& f) {
  const auto& init = mdp.initial_distribution();
  std::vector<Belief::Entry> live;
  double mass = 0.0;
  for (StateId s = 0; s < init.size(); ++s) {
    if (init[s] > 0.0 && !mdp.is_terminal(s)) {
      live.push_back({s, init[s]});
      mass += init[s];
    }
  }
  if (mass <= 1e-15) return 0.0;
  for (auto& e : live) e.second /= mass;
  return mass * f(Belief::from_entries(std::move(live)));
}

double ExactPlanner::pair_value(const PolicySpec& policy, Memo& memo, const Belief& b,
                                std::size_t k, ActionId a, Measure m) const {
  double r = 0.0;
  for (const auto& [s, w] : b.support()) r += w * mdp_.reward(s, a);
  if (observes(m)) r -= mdp_.measure_cost();
  if (k <= 1) return r;
  const Successors next = split_successors(mdp_, b, a);
  double future = 0.0;
  if (observes(m)) {
    for (StateId s = 0; s < next.next.size(); ++s) {
      if (next.next[s] > 0.0 && !mdp_.is_terminal(s)) {
        future += next.next[s] * policy_value(policy, memo, Belief::collapse(s), k - 1);
      }
    }
  } else if (!next.continuing.empty()) {
    future = (1.0 - next.terminal_mass) * policy_value(policy, memo, next.continuing, k - 1);
  }
  return r + mdp_.discount() * future;
}

double ExactPlanner::approx_mv(const Belief& b, ActionId a, std::size_t k) const {
  const QTable& q = qmdp_.at(k - 1);
  const Belief predicted = Belief::from_dense(pushforward(mdp_, b, a));
  return acno::measuring_value(
      predicted, [&](StateId s, ActionId x) { return mdp_.is_terminal(s) ? 0.0 : q(s, x); },
      mdp_.action_count(), mdp_.discount(), mdp_.measure_cost());
}

double ExactPlanner::policy_value(const PolicySpec& policy, Memo& memo, const Belief& b,
                                  std::size_t k) const {
  if (k == 0) return 0.0;
  const Key id = key(b, k);
  if (auto it = memo.find(id); it != memo.end()) return it->second;
  const ActionId a = atm_control(b, k);
  double v = 0.0;
  switch (policy.rule) {
    case MeasureRule::kMeasuringValue: {
      const double measured = pair_value(policy, memo, b, k, a, Measure::kObserve);
      const double skipped = pair_value(policy, memo, b, k, a, Measure::kSkip);
      v = measured >= skipped ? measured : skipped;
      break;
    }
    case MeasureRule::kApproxMv:
      v = pair_value(policy, memo, b, k, a,
                     measure_from(k > 1 && approx_mv(b, a, k) >= 0.0));
      break;
    case MeasureRule::kAlways:
      v = pair_value(policy, memo, b, k, a, Measure::kObserve);
      break;
    case MeasureRule::kNever:
      v = pair_value(policy, memo, b, k, a, Measure::kSkip);
      break;
    case MeasureRule::kPsi:
      v = pair_value(policy, memo, b, k, a, policy.psi(b));
      break;
  }
  memo.emplace(id, v);
  check_budget(memo);
  return v;
}

double ExactPlanner::optimal_pair_value(Memo& memo, const Belief& b, std::size_t k, ActionId a,
                                        Measure m) const {
  double r = 0.0;
  for (const auto& [s, w] : b.support()) r += w * mdp_.reward(s, a);
  if (observes(m)) r -= mdp_.measure_cost();
  if (k <= 1) return r;
  const Successors next = split_successors(mdp_, b, a);
  double future = 0.0;
  if (observes(m)) {
    for (StateId s = 0; s < next.next.size(); ++s) {
      if (next.next[s] > 0.0 && !mdp_.is_terminal(s)) {
        future += next.next[s] * optimal_value(memo, Belief::collapse(s), k - 1);
      }
    }
  } else if (!next.continuing.empty()) {
    future = (1.0 - next.terminal_mass) * optimal_value(memo, next.continuing, k - 1);
  }
  return r + mdp_.discount() * future;
}

double ExactPlanner::optimal_value(Memo& memo, const Belief& b, std::size_t k) const {
  if (k == 0) return 0.0;
  const Key id = key(b, k);
  if (auto it = memo.find(id); it != memo.end()) return it->second;
  double best = -std::numeric_limits<double>::infinity();
  for (ActionId a = 0; a < mdp_.action_count(); ++a) {
    for (Measure m : {Measure::kSkip, Measure::kObserve}) {
      best = std::max(best, optimal_pair_value(memo, b, k, a, m));
    }
  }
  memo.emplace(id, best);
  check_budget(memo);
  return best;
}

Evaluation ExactPlanner::evaluate(const PolicySpec& policy) const {
  Memo memo;
  const double v = root_value(mdp_, [&](const Belief& b) { return policy_value(policy, memo, b, horizon_); });
  return finish(v, memo);
}

double ExactPlanner::value(const PolicySpec& policy, const Belief& b, std::size_t steps_to_go) const {
  Memo memo;
  return policy_value(policy, memo, b, steps_to_go);
}

Evaluation ExactPlanner::optimal() const {
  Memo memo;
  const double v = root_value(mdp_, [&](const Belief& b) { return optimal_value(memo, b, horizon_); });
  return finish(v, memo);
}

double ExactPlanner::exact_measuring_value(const Belief& b, ActionId a, std::size_t steps_to_go) const {
  Memo memo;
  const PolicySpec mv = PolicySpec::measuring_value();
  return pair_value(mv, memo, b, steps_to_go, a, Measure::kObserve) -
         pair_value(mv, memo, b, steps_to_go, a, Measure::kSkip);
}

NodeStats ExactPlanner::node_statistics() const {
  NodeStats stats;
  Memo memo;
  const PolicySpec mv = PolicySpec::measuring_value();
  std::set<Key> seen;
  std::vector<std::pair<Belief, std::size_t>> stack;
  root_value(mdp_, [&](const Belief& b) {
    stack.push_back({b, horizon_});
    return 0.0;
  });
  while (!stack.empty()) {
    auto [b, k] = std::move(stack.back());
    stack.pop_back();
    if (k <= 1 || !seen.insert(key(b, k)).second) continue;
    const ActionId a = atm_control(b, k);
    const Successors next = split_successors(mdp_, b, a);

    const double exact = pair_value(mv, memo, b, k, a, Measure::kObserve) -
                         pair_value(mv, memo, b, k, a, Measure::kSkip);
    const double approx = approx_mv(b, a, k);
    if (!next.continuing.empty() && next.continuing.size() > 1) {
      ++stats.decision_nodes;
      if (approx >= exact - 1e-9) {
        ++stats.approx_overestimates;
      } else {
        ++stats.approx_violations;
        stats.worst_underestimate = std::max(stats.worst_underestimate, exact - approx);
      }
      if (k >= 2) {
        // Belief form versus state-weighted form of the best pair at b_next:
        // they agree when the weighted argmax is also optimal for the belief.
        const Belief& bn = next.continuing;
        std::vector<double> belief_q;
        std::vector<double> weighted_q;
        for (ActionId x = 0; x < mdp_.action_count(); ++x) {
          for (Measure m : {Measure::kSkip, Measure::kObserve}) {
            belief_q.push_back(pair_value(mv, memo, bn, k - 1, x, m));
            double qw = 0.0;
            for (const auto& [s, w] : bn.support()) {
              qw += w * pair_value(mv, memo, Belief::collapse(s), k - 1, x, m);
            }
            weighted_q.push_back(qw);
          }
        }
        const auto pick = static_cast<std::size_t>(
            std::max_element(weighted_q.begin(), weighted_q.end()) - weighted_q.begin());
        const double best_belief = *std::max_element(belief_q.begin(), belief_q.end());
        ++stats.linearity_checked;
        if (belief_q[pick] >= best_belief - 1e-9) ++stats.linearity_agree;
      }
    }
    for (StateId s = 0; s < next.next.size(); ++s) {
      if (next.next[s] > 0.0 && !mdp_.is_terminal(s)) stack.push_back({Belief::collapse(s), k - 1});
    }
    if (!next.continuing.empty()) stack.push_back({next.continuing, k - 1});
  }
  return stats;
}

std::vector<Belief> ExactPlanner::reachable_beliefs() const {
  std::set<Key> visited;
  std::map<MassKey, Belief> found;
  std::vector<std::pair<Belief, std::size_t>> stack;
  root_value(mdp_, [&](const Belief& b) {
    stack.push_back({b, horizon_});
    return 0.0;
  });
  while (!stack.empty()) {
    auto [b, k] = std::move(stack.back());
    stack.pop_back();
    if (k == 0 || !visited.insert(key(b, k)).second) continue;
    found.emplace(mass_key(b), b);
    if (k == 1) continue;
    const ActionId a = atm_control(b, k);
    const Successors next = split_successors(mdp_, b, a);
    for (StateId s = 0; s < next.next.size(); ++s) {
      if (next.next[s] > 0.0 && !mdp_.is_terminal(s)) stack.push_back({Belief::collapse(s), k - 1});
    }
    if (!next.continuing.empty()) stack.push_back({next.continuing, k - 1});
  }
  std::vector<Belief> out;
  out.reserve(found.size());
  for (auto& [k, b] : found) out.push_back(std::move(b));
  return out;
}

TheoremReport verify_theorem_bound(const TabularAcnoMdp& mdp, std::size_t horizon) {
  TheoremReport r;
  const ExactPlanner planner(mdp, horizon);
  r.v_star = planner.optimal().value;
  r.v_atm = planner.evaluate(PolicySpec::measuring_value()).value;
  r.v_measure = planner.evaluate(PolicySpec::always()).value;
  r.v_free_star = ExactPlanner(mdp.with_cost(0.0), horizon).optimal().value;
  r.loss = r.v_star - r.v_atm;
  double weight = 1.0;
  for (std::size_t t = 0; t < horizon; ++t) {
    r.bound += weight * mdp.measure_cost();
    weight *= mdp.discount();
  }
  r.pass = r.loss <= r.bound + 1e-6;
  return r;
}

LemmaReport verify_lemma_mv_optimal(const TabularAcnoMdp& mdp, std::size_t horizon,
                                    std::size_t max_tables, std::uint64_t seed) {
  LemmaReport r;
  const ExactPlanner planner(mdp, horizon);
  r.v_atm = planner.evaluate(PolicySpec::measuring_value()).value;
  r.v_always = planner.evaluate(PolicySpec::always()).value;
  r.v_never = planner.evaluate(PolicySpec::never()).value;

  const std::vector<Belief> beliefs = planner.reachable_beliefs();
  r.reachable = beliefs.size();
  std::vector<MassKey> keys;
  keys.reserve(beliefs.size());
  for (const auto& b : beliefs) keys.push_back(mass_key(b));

  std::vector<std::vector<bool>> tables;
  const std::size_t n = beliefs.size();
  if (n < 63 && (std::uint64_t{1} << n) <= max_tables) {
    r.enumerated = true;
    for (std::uint64_t bits = 0; bits < (std::uint64_t{1} << n); ++bits) {
      std::vector<bool> t(n);
      for (std::size_t i = 0; i < n; ++i) t[i] = (bits >> i) & 1U;
      tables.push_back(std::move(t));
    }
  } else {
    tables.push_back(std::vector<bool>(n, true));
    tables.push_back(std::vector<bool>(n, false));
    Rng rng(seed);
    while (tables.size() < max_tables) {
      std::vector<bool> t(n);
      for (std::size_t i = 0; i < n; ++i) t[i] = uniform01(rng) < 0.5;
      tables.push_back(std::move(t));
    }
  }

  r.best_alternative = -std::numeric_limits<double>::infinity();
  for (const auto& t : tables) {
    std::map<MassKey, Measure> lookup;
    for (std::size_t i = 0; i < n; ++i) lookup.emplace(keys[i], measure_from(t[i]));
    const PolicySpec spec = PolicySpec::table([&lookup](const Belief& b) {
      const auto it = lookup.find(mass_key(b));
      return it == lookup.end() ? Measure::kSkip : it->second;
    });
    const double v = planner.evaluate(spec).value;
    r.best_alternative = std::max(r.best_alternative, v);
    if (v > r.v_atm + 1e-9) ++r.violations;
    ++r.alternatives;
  }
  r.pass = r.violations == 0;
  return r;
}

TabularAcnoMdp random_tiny_mdp(std::uint64_t seed, std::size_t max_states, std::size_t max_actions) {
  if (max_states < 2 || max_actions < 1) throw std::invalid_argument("random_tiny_mdp: need >= 2 states and >= 1 action");
  Rng rng(seed);
  MdpData d;
  d.state_count = 2 + uniform_index(rng, max_states - 1);
  d.action_count = 1 + uniform_index(rng, max_actions);
  const std::size_t S = d.state_count;
  const std::size_t A = d.action_count;
  d.transition.assign(S * A * S, 0.0);
  d.reward.assign(S * A * S, 0.0);
  d.terminal.assign(S, false);
  if (S > 2 && uniform01(rng) < 0.5) d.terminal[S - 1] = true;
  for (StateId s = 0; s < S; ++s) {
    for (ActionId a = 0; a < A; ++a) {
      double total = 0.0;
      const std::size_t base = (s * A + a) * S;
      // Each successor is kept with probability 0.6; at least one survives.
      for (StateId n = 0; n < S; ++n) {
        if (uniform01(rng) < 0.6) {
          d.transition[base + n] = 0.05 + uniform01(rng);
          total += d.transition[base + n];
        }
      }
      if (total == 0.0) {
        const StateId n = uniform_index(rng, S);
        d.transition[base + n] = 1.0;
        total = 1.0;
      }
      for (StateId n = 0; n < S; ++n) {
        d.transition[base + n] /= total;
        d.reward[base + n] = uniform01(rng);
      }
    }
  }
  d.measure_cost = 0.3 * uniform01(rng);
  d.discount = 0.8 + 0.2 * uniform01(rng);
  d.initial.assign(S, 0.0);
  if (uniform01(rng) < 0.5) {
    d.initial[0] = 1.0;
  } else {
    double total = 0.0;
    for (StateId s = 0; s < S; ++s) {
      if (!d.terminal[s]) {
        d.initial[s] = 0.1 + uniform01(rng);
        total += d.initial[s];
      }
    }
    for (auto& x : d.initial) x /= total;
  }
  d.r_max = 1.0;
  return TabularAcnoMdp(std::move(d));
}

}  // namespace acno
