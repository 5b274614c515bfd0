#include "acno/amrl_agent.hpp"

#include <algorithm>
#include <stdexcept>

namespace acno {

void AmrlConfig::validate() const {
  if (!(discount >= 0.0 && discount <= 1.0)) throw std::invalid_argument("amrl: discount must lie in [0, 1]");
  if (!(learning_rate > 0.0 && learning_rate <= 1.0)) {
    throw std::invalid_argument("amrl: learning rate must lie in (0, 1]");
  }
  if (!(epsilon >= 0.0 && epsilon <= 1.0)) throw std::invalid_argument("amrl: epsilon must lie in [0, 1]");
  if (!(greedy_tail_fraction >= 0.0 && greedy_tail_fraction <= 1.0)) {
    throw std::invalid_argument("amrl: greedy tail fraction must lie in [0, 1]");
  }
}

AmrlAgent::AmrlAgent(std::size_t state_count, std::size_t action_count, double measure_cost,
                     AmrlConfig config)
    : state_count_(state_count),
      action_count_(action_count),
      measure_cost_(measure_cost),
      config_(config) {
  config_.validate();
  if (state_count == 0 || action_count == 0) throw std::invalid_argument("amrl: empty state or action space");
  q_.assign(state_count * action_count * 2, 0.0);
  for (StateId s = 0; s < state_count; ++s)
    for (ActionId a = 0; a < action_count; ++a) q_[index(s, {a, Measure::kObserve})] = config_.bias;
  counts_.assign(state_count * action_count * state_count, 1.0 / static_cast<double>(state_count));
  totals_.assign(state_count * action_count, 1.0);
}

double AmrlAgent::best(StateId s) const {
  const auto first = q_.begin() + static_cast<std::ptrdiff_t>(s * action_count_ * 2);
  return *std::max_element(first, first + static_cast<std::ptrdiff_t>(action_count_ * 2));
}

ActionPair AmrlAgent::greedy(StateId s, Rng& rng) const {
  const double top = best(s);
  std::vector<ActionPair> ties;
  for (ActionId a = 0; a < action_count_; ++a) {
    for (Measure m : {Measure::kSkip, Measure::kObserve}) {
      if (q(s, {a, m}) >= top - 1e-12) ties.push_back({a, m});
    }
  }
  return ties.size() == 1 ? ties.front() : ties[uniform_index(rng, ties.size())];
}

ActionPair AmrlAgent::select(StateId s_est, std::size_t episode_index, std::size_t total_episodes,
                             Rng& rng) const {
  const double tail_start = static_cast<double>(total_episodes) * (1.0 - config_.greedy_tail_fraction);
  const bool exploring = static_cast<double>(episode_index) < tail_start;
  if (exploring && uniform01(rng) < config_.epsilon) {
    const std::size_t pick = uniform_index(rng, action_count_ * 2);
    return {pick / 2, measure_from(pick % 2 == 1)};
  }
  return greedy(s_est, rng);
}

void AmrlAgent::phat_update(StateId s, ActionId a, StateId observed) {
  counts_[(s * action_count_ + a) * state_count_ + observed] += 1.0;
  totals_[s * action_count_ + a] += 1.0;
}

StateId AmrlAgent::most_likely_successor(StateId s, ActionId a) const {
  const auto first = counts_.begin() + static_cast<std::ptrdiff_t>((s * action_count_ + a) * state_count_);
  return static_cast<StateId>(
      std::max_element(first, first + static_cast<std::ptrdiff_t>(state_count_)) - first);
}

void AmrlAgent::update(StateId s, ActionId a, double reward, StateId next, bool done) {
  const double future = done ? 0.0 : config_.discount * best(next);
  for (Measure m : {Measure::kSkip, Measure::kObserve}) {
    double& entry = q_[index(s, {a, m})];
    const double target = scalarize(reward, m, measure_cost_) + future;
    entry += config_.learning_rate * (target - entry);
  }
}

EpisodeRecord AmrlAgent::run_episode(const TabularAcnoMdp& env, Rng& rng, std::size_t episode_index,
                                     std::size_t total_episodes, std::size_t step_cap) {
  if (env.state_count() != state_count_ || env.action_count() != action_count_) {
    throw std::invalid_argument("amrl: environment size does not match the agent");
  }
  EpisodeRecord record;
  const auto& init = env.initial_distribution();
  StateId estimate = static_cast<StateId>(std::max_element(init.begin(), init.end()) - init.begin());
  StateId state = env.sample_initial(rng);
  while (true) {
    if (record.steps >= step_cap) {
      record.truncated = true;
      break;
    }
    const ActionPair pair = select(estimate, episode_index, total_episodes, rng);
    const auto [outcome, next] = step(env, state, pair, rng);
    StateId successor;
    if (outcome.observation) {
      successor = *outcome.observation;
      phat_update(estimate, pair.control, successor);
    } else {
      successor = most_likely_successor(estimate, pair.control);
    }
    update(estimate, pair.control, outcome.reward, successor, outcome.done);

    record.scalarized_return += outcome.scalarized;
    record.raw_return += outcome.reward;
    record.measurements += observes(pair.measure) ? 1 : 0;
    ++record.steps;
    estimate = successor;
    state = next;
    if (outcome.done) break;
  }
  return record;
}

}  // namespace acno
