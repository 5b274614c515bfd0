#include "acno/atmq_agent.hpp"

#include <algorithm>
#include <iomanip>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace acno {

void AtmqConfig::validate() const {
  if (!(discount >= 0.0 && discount <= 1.0)) throw std::invalid_argument("atmq: discount must lie in [0, 1]");
  if (!(learning_rate > 0.0 && learning_rate <= 1.0)) {
    throw std::invalid_argument("atmq: learning rate must lie in (0, 1]");
  }
  if (n_b == 0) throw std::invalid_argument("atmq: n_b must be >= 1");
  if (!(eps_train >= 0.0 && eps_train <= 1.0)) throw std::invalid_argument("atmq: eps_train must lie in [0, 1]");
}

double QTable::max(StateId s) const {
  double best = (*this)(s, 0);
  for (ActionId a = 1; a < action_count_; ++a) best = std::max(best, (*this)(s, a));
  return best;
}

AtmqAgent::AtmqAgent(std::size_t state_count, std::size_t action_count, double r_max,
                     double measure_cost, AtmqConfig config)
    : config_(config),
      r_max_(r_max),
      measure_cost_(measure_cost),
      q_(state_count, action_count, 0.0),
      model_(state_count, action_count),
      terminal_(state_count, false) {
  config_.validate();
}

double AtmqAgent::bonus(StateId s, ActionId a) const {
  if (config_.n_opt == 0) return 0.0;
  const double n_opt = static_cast<double>(config_.n_opt);
  const double scale = (n_opt - model_.measured_visits(s, a)) / n_opt;
  // Both factors can be negative once q exceeds R_max; the bonus is spent by then.
  if (scale <= 0.0) return 0.0;
  return std::max(0.0, scale * (r_max_ - q_(s, a)));
}

ActionId AtmqAgent::greedy_action(const Belief& b, Rng& rng) const {
  return greedy_control_action([this](StateId s, ActionId a) { return optimistic_value(s, a); },
                               action_count(), b, rng);
}

double AtmqAgent::measuring_value(const Belief& b_next) const {
  return acno::measuring_value(b_next, [this](StateId s, ActionId a) { return value(s, a); },
                               action_count(), config_.discount, measure_cost_);
}

Measure AtmqAgent::decide_measurement(const Belief& b, ActionId a, const Belief& b_next) const {
  if (const auto s = b.certain_state();
      s && model_.measured_visits(*s, a) < static_cast<double>(config_.n_m)) {
    return Measure::kObserve;
  }
  return measure_from(measuring_value(b_next) >= 0.0);
}

void AtmqAgent::q_update(const Belief& b, ActionId a, double reward, bool episode_end) {
  const std::size_t S = state_count();
  const std::size_t A = action_count();
  std::vector<double> best_next(S, 0.0);
  for (StateId n = 0; n < S; ++n) {
    if (terminal_[n]) continue;
    double best = optimistic_value(n, 0);
    for (ActionId x = 1; x < A; ++x) best = std::max(best, optimistic_value(n, x));
    best_next[n] = best;
  }
  // Targets are computed against the pre-update table so the order of the
  // support does not matter.
  std::vector<std::pair<StateId, double>> targets;
  targets.reserve(b.size());
  for (const auto& [s, w] : b.support()) {
    if (terminal_[s]) continue;
    double future = 0.0;
    const double total = model_.measured_visits(s, a);
    if (!episode_end)
      for (StateId n = 0; n < S; ++n) future += model_.alpha(s, a, n) / total * best_next[n];
    targets.push_back({s, reward + config_.discount * future});
  }
  std::size_t i = 0;
  for (const auto& [s, w] : b.support()) {
    if (terminal_[s]) continue;
    const double rate = w * config_.learning_rate;
    q_(s, a) = (1.0 - rate) * q_(s, a) + rate * targets[i++].second;
  }
}

void AtmqAgent::dyna_train(std::size_t count, Rng& rng) {
  const std::size_t S = state_count();
  const std::size_t A = action_count();
  for (std::size_t i = 0; i < count; ++i) {
    const StateId s = uniform_index(rng, S);
    const Belief point = Belief::collapse(s);
    ActionId a = greedy_control_action([this](StateId x, ActionId y) { return value(x, y); }, A,
                                       point, rng);
    if (A > 1 && uniform01(rng) >= config_.eps_train) {
      // Uniform over the other actions.
      ActionId other = uniform_index(rng, A - 1);
      if (other >= a) ++other;
      a = other;
    }
    if (terminal_[s]) continue;
    q_update(point, a, model_.reward_avg(s, a));
  }
}

EpisodeRecord AtmqAgent::run_episode(const TabularAcnoMdp& env, Rng& rng,
                                     const EpisodeOptions& options) {
  if (env.state_count() != state_count() || env.action_count() != action_count()) {
    throw std::invalid_argument("atmq: environment size does not match the agent");
  }
  EpisodeRecord record;
  Belief belief = Belief::from_dense(env.initial_distribution());
  StateId state = env.sample_initial(rng);
  while (true) {
    if (record.steps >= options.step_cap) {
      record.truncated = true;
      break;
    }
    const ActionId a = greedy_action(belief, rng);
    const Belief predicted = sample_next(model_, belief, a, config_.n_b, rng);
    const Measure m = decide_measurement(belief, a, predicted);
    const auto [outcome, next] = step(env, state, {a, m}, rng);

    Belief successor;
    if (outcome.observation) {
      const StateId seen = *outcome.observation;
      if (const auto from = belief.certain_state()) {
        model_.record_measured_transition(*from, a, seen, outcome.reward);
      }
      if (outcome.done && config_.pin_terminals) mark_terminal(seen);
      successor = Belief::collapse(seen);
    } else {
      successor = predicted;
    }

    const double learn_reward =
        config_.reward_mode == RewardMode::kScalarized ? outcome.scalarized : outcome.reward;
    q_update(belief, a, learn_reward, outcome.done && config_.zero_future_on_done);
    if (options.train_model) dyna_train(config_.n_train, rng);

    record.scalarized_return += outcome.scalarized;
    record.raw_return += outcome.reward;
    record.measurements += observes(m) ? 1 : 0;
    ++record.steps;
    belief = std::move(successor);
    state = next;
    if (outcome.done) break;
  }
  return record;
}

std::string AtmqAgent::serialize() const {
  std::ostringstream out;
  out << std::setprecision(std::numeric_limits<double>::max_digits10);
  out << "atmq " << state_count() << ' ' << action_count() << ' ' << r_max_ << ' '
      << measure_cost_ << '\n';
  for (StateId s = 0; s < state_count(); ++s) {
    for (ActionId a = 0; a < action_count(); ++a) out << (a ? " " : "") << q_(s, a);
    out << '\n';
  }
  out << "terminal";
  for (StateId s = 0; s < state_count(); ++s)
    if (terminal_[s]) out << ' ' << s;
  out << '\n' << model_.serialize();
  return out.str();
}

AtmqAgent AtmqAgent::deserialize(const std::string& text, AtmqConfig config) {
  std::istringstream in(text);
  std::string tag;
  std::size_t S = 0;
  std::size_t A = 0;
  double r_max = 0.0;
  double cost = 0.0;
  if (!(in >> tag >> S >> A >> r_max >> cost) || tag != "atmq") {
    throw std::invalid_argument("atmq checkpoint: bad header");
  }
  AtmqAgent agent(S, A, r_max, cost, config);
  for (StateId s = 0; s < S; ++s)
    for (ActionId a = 0; a < A; ++a) in >> agent.q_(s, a);
  in >> tag;
  if (!in || tag != "terminal") throw std::invalid_argument("atmq checkpoint: missing terminal line");
  std::string line;
  std::getline(in, line);
  std::istringstream terminals(line);
  StateId t = 0;
  while (terminals >> t) agent.mark_terminal(t);
  std::string rest((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  agent.model_ = DirichletModel::deserialize(rest);
  return agent;
}

}  // namespace acno
