#pragma once

#include <cstddef>
#include <limits>
#include <string>
#include <vector>

#include "acno/belief.hpp"
#include "acno/dirichlet_model.hpp"
#include "acno/episode.hpp"
#include "acno/mdp.hpp"
#include "acno/rng.hpp"

namespace acno {

/// Reward fed into the real-step Q-update. kRaw uses r (the default);
/// kScalarized uses r - C(m).
enum class RewardMode { kRaw, kScalarized };


struct AtmqConfig {
  double discount = 0.95;
  double learning_rate = 0.1;
  std::size_t n_b = 100;     // particles per sampled belief
  std::size_t n_opt = 20;    // visits until the optimism bonus vanishes
  std::size_t n_m = 20;      // exploratory measurements per (s, a)
  std::size_t n_train = 25;  // Dyna updates per real step; 0 gives plain ATMQ
  double eps_train = 0.5;    // probability a Dyna step trains the greedy action
  RewardMode reward_mode = RewardMode::kRaw;
  // Pin the value of states seen to end an episode to zero. Without it the
  // optimistic bootstrap from terminals inflates every q and the agent never
  // measures.
  bool pin_terminals = true;
  // A real step that ends the episode has no future value, measured or not.
  bool zero_future_on_done = true;

  /// Throws std::invalid_argument on out-of-range values.
  void validate() const;
};

/// Dense |S| x |A| value table.
class QTable {
 public:
  QTable() = default;
  QTable(std::size_t state_count, std::size_t action_count, double init = 0.0)
      : state_count_(state_count), action_count_(action_count),
        values_(state_count * action_count, init) {}

  std::size_t state_count() const { return state_count_; }
  std::size_t action_count() const { return action_count_; }
  double operator()(StateId s, ActionId a) const { return values_[s * action_count_ + a]; }
  double& operator()(StateId s, ActionId a) { return values_[s * action_count_ + a]; }
  double max(StateId s) const;
  const std::vector<double>& values() const { return values_; }

  friend bool operator==(const QTable&, const QTable&) = default;

 private:
  std::size_t state_count_ = 0;
  std::size_t action_count_ = 0;
  std::vector<double> values_;
};

inline constexpr double kTieTolerance = 1e-12;

/// argmax_a sum_s b(s) value(s, a). Near-ties (within kTieTolerance) are
/// broken uniformly at random with `rng`.
template <typename ValueFn>
ActionId greedy_control_action(const ValueFn& value, std::size_t action_count, const Belief& b,
                               Rng& rng) {
  std::vector<double> scores(action_count, 0.0);
  for (const auto& [s, w] : b.support())
    for (ActionId a = 0; a < action_count; ++a) scores[a] += w * value(s, a);
  double best = scores[0];
  for (double v : scores) best = std::max(best, v);
  std::vector<ActionId> ties;
  for (ActionId a = 0; a < action_count; ++a)
    if (scores[a] >= best - kTieTolerance) ties.push_back(a);
  return ties.size() == 1 ? ties.front() : ties[uniform_index(rng, ties.size())];
}

/// Measuring value of the predicted belief `b_next` with learned values
/// standing in for the act-then-measure Q-function:
///   -cost + discount * sum_s b_next(s) [max_a value(s, a) - value(s, a_b)]
/// where a_b maximises sum_s b_next(s) value(s, a).
template <typename ValueFn>
double measuring_value(const Belief& b_next, const ValueFn& value, std::size_t action_count,
                       double discount, double cost) {
  ActionId belief_optimal = 0;
  double best = -std::numeric_limits<double>::infinity();
  for (ActionId a = 0; a < action_count; ++a) {
    double score = 0.0;
    for (const auto& [s, w] : b_next.support()) score += w * value(s, a);
    if (score > best) {
      best = score;
      belief_optimal = a;
    }
  }
  double gain = 0.0;
  for (const auto& [s, w] : b_next.support()) {
    double state_best = value(s, 0);
    for (ActionId a = 1; a < action_count; ++a) state_best = std::max(state_best, value(s, a));
    gain += w * (state_best - value(s, belief_optimal));
  }
  return -cost + discount * gain;
}

/// Dyna-ATMQ: act-then-measure control, measuring-value measurements,
/// replicated Q-learning with an optimism bonus, and Dyna model training.
///
/// With `pin_terminals`, the agent learns which states are terminal from
/// measured transitions that end the episode and pins their values to zero.
class AtmqAgent {
 public:
  AtmqAgent(std::size_t state_count, std::size_t action_count, double r_max, double measure_cost,
            AtmqConfig config);

  std::size_t state_count() const { return q_.state_count(); }
  std::size_t action_count() const { return q_.action_count(); }
  const AtmqConfig& config() const { return config_; }
  double r_max() const { return r_max_; }
  double measure_cost() const { return measure_cost_; }

  const QTable& q() const { return q_; }
  QTable& q() { return q_; }
  const DirichletModel& model() const { return model_; }
  DirichletModel& model() { return model_; }

  bool known_terminal(StateId s) const { return terminal_[s]; }
  void mark_terminal(StateId s) { terminal_[s] = true; }

  /// q with known terminal states pinned to zero.
  double value(StateId s, ActionId a) const { return terminal_[s] ? 0.0 : q_(s, a); }
  /// max[0, (N_opt - alpha_{s,a}) / N_opt * (R_max - q(s, a))]
  double bonus(StateId s, ActionId a) const;
  double optimistic_value(StateId s, ActionId a) const {
    return terminal_[s] ? 0.0 : q_(s, a) + bonus(s, a);
  }

  /// Greedy control action on the optimistic values.
  ActionId greedy_action(const Belief& b, Rng& rng) const;
  double measuring_value(const Belief& b_next) const;
  /// Exploratory measurement while some certain state has alpha_{s,a} < N_m,
  /// otherwise measure iff the measuring value is non-negative.
  Measure decide_measurement(const Belief& b, ActionId a, const Belief& b_next) const;

  /// Replicated Q-update: each s in b's support moves towards
  /// reward + discount * sum_s' P(s'|s,a) max_a' q_opt(s', a') at rate b(s) eta.
  /// With `episode_end` the future term is dropped.
  void q_update(const Belief& b, ActionId a, double reward, bool episode_end = false);

  /// `count` simulated updates on random states with the average measured reward.
  void dyna_train(std::size_t count, Rng& rng);

  struct EpisodeOptions {
    std::size_t step_cap = 1000;
    bool train_model = true;  // run Dyna steps after each real step
  };
  EpisodeRecord run_episode(const TabularAcnoMdp& env, Rng& rng, const EpisodeOptions& options);

  /// Text checkpoint of q, known terminals and the Dirichlet model.
  std::string serialize() const;
  static AtmqAgent deserialize(const std::string& text, AtmqConfig config);

 private:
  AtmqConfig config_;
  double r_max_;
  double measure_cost_;
  QTable q_;
  DirichletModel model_;
  std::vector<bool> terminal_;
};

}  // namespace acno
