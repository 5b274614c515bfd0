#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "acno/episode.hpp"
#include "acno/mdp.hpp"
#include "acno/rng.hpp"

namespace acno {

struct AmrlConfig {
  double discount = 0.95;
  double learning_rate = 0.1;
  double bias = 0.1;                  // initial value of every measuring entry
  double epsilon = 0.1;
  double greedy_tail_fraction = 0.1;  // final share of episodes run fully greedy

  void validate() const;
};

/// AMRL-Q: Q-learning over action pairs with a most-likely-state
/// approximation whenever the successor is not measured.
class AmrlAgent {
 public:
  AmrlAgent(std::size_t state_count, std::size_t action_count, double measure_cost, AmrlConfig config);

  std::size_t state_count() const { return state_count_; }
  std::size_t action_count() const { return action_count_; }
  const AmrlConfig& config() const { return config_; }

  double q(StateId s, ActionPair pair) const { return q_[index(s, pair)]; }
  double& q(StateId s, ActionPair pair) { return q_[index(s, pair)]; }
  double p_hat(StateId s, ActionId a, StateId next) const {
    return counts_[(s * action_count_ + a) * state_count_ + next] / totals_[s * action_count_ + a];
  }

  /// Epsilon-greedy over all action pairs; greedy once episode_index falls in
  /// the tail. Near-ties in the argmax are broken uniformly at random.
  ActionPair select(StateId s_est, std::size_t episode_index, std::size_t total_episodes, Rng& rng) const;
  ActionPair greedy(StateId s_est, Rng& rng) const;

  /// Count-based update with a uniform prior of 1/|S| per successor.
  void phat_update(StateId s, ActionId a, StateId observed);
  /// argmax_s' p_hat(s'|s,a), lowest index on ties.
  StateId most_likely_successor(StateId s, ActionId a) const;

  /// Updates both measurement variants of (s, a) towards
  /// reward - C(m) + discount * max q(next, .). A terminal successor
  /// contributes no future value.
  void update(StateId s, ActionId a, double reward, StateId next, bool done);

  EpisodeRecord run_episode(const TabularAcnoMdp& env, Rng& rng, std::size_t episode_index,
                            std::size_t total_episodes, std::size_t step_cap);

 private:
  std::size_t index(StateId s, ActionPair pair) const {
    return (s * action_count_ + pair.control) * 2 + static_cast<std::size_t>(pair.measure);
  }
  double best(StateId s) const;

  std::size_t state_count_;
  std::size_t action_count_;
  double measure_cost_;
  AmrlConfig config_;
  std::vector<double> q_;
  std::vector<double> counts_;
  std::vector<double> totals_;
};

}  // namespace acno
