#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "acno/rng.hpp"
#include "acno/types.hpp"

namespace acno {

/// Raw tables used to construct a TabularAcnoMdp. Dense layouts are indexed
/// [s][a][s'] (row-major) and sized state_count * action_count * state_count.
struct MdpData {
  std::size_t state_count = 0;
  std::size_t action_count = 0;
  std::vector<double> transition;
  /// Reward received for the transition (s, a, s'). The expected reward
  /// R(s, a) is derived from it.
  std::vector<double> reward;
  double measure_cost = 0.0;
  double discount = 1.0;
  /// Initial state distribution. Empty means "state 0".
  std::vector<double> initial;
  std::vector<bool> terminal;
  /// Optional user-supplied bound; raised to the true maximum if lower.
  double r_max = 0.0;
};

/// An action-contingent noiselessly observable MDP over finite S and A.
///
/// Immutable after construction. Terminal states are forced to be absorbing
/// with zero reward regardless of what the input tables say for their rows.
class TabularAcnoMdp {
 public:
  /// Validates `data` and throws std::invalid_argument with a description of
  /// the first violated invariant.
  explicit TabularAcnoMdp(MdpData data);

  std::size_t state_count() const { return data_.state_count; }
  std::size_t action_count() const { return data_.action_count; }
  double measure_cost() const { return data_.measure_cost; }
  double discount() const { return data_.discount; }
  double r_max() const { return data_.r_max; }

  double transition(StateId s, ActionId a, StateId next) const {
    return data_.transition[index(s, a, next)];
  }
  std::span<const double> transition_row(StateId s, ActionId a) const {
    return {data_.transition.data() + index(s, a, 0), data_.state_count};
  }
  /// Probability accessor shared with learned models (see belief.hpp).
  double probability(StateId s, ActionId a, StateId next) const {
    return transition(s, a, next);
  }

  double reward(StateId s, ActionId a) const {
    return expected_reward_[s * data_.action_count + a];
  }
  double reward(StateId s, ActionId a, StateId next) const {
    return data_.reward[index(s, a, next)];
  }

  bool is_terminal(StateId s) const { return data_.terminal[s]; }
  const std::vector<double>& initial_distribution() const { return data_.initial; }
  const MdpData& data() const { return data_; }

  /// Copy with a different measurement cost (the c = 0 companion model).
  TabularAcnoMdp with_cost(double cost) const;
  TabularAcnoMdp with_discount(double discount) const;

  StateId sample_initial(Rng& rng) const;

 private:
  std::size_t index(StateId s, ActionId a, StateId next) const {
    return (s * data_.action_count + a) * data_.state_count + next;
  }

  MdpData data_;
  std::vector<double> expected_reward_;
};

/// Everything the environment hands back after one action pair.
struct StepOutcome {
  Observation observation;
  double reward = 0.0;
  double cost = 0.0;
  double scalarized = 0.0;
  bool done = false;
};

/// Scalarized reward: reward minus the measurement cost when measuring.
double scalarize(double reward, Measure measure, double cost);

/// Draws the successor of `state` under `pair.control`. Throws
/// ContractViolation when `state` is terminal.
std::pair<StepOutcome, StateId> step(const TabularAcnoMdp& mdp, StateId state,
                                     ActionPair pair, Rng& rng);

/// Samples an index from a probability vector by cumulative inversion.
std::size_t sample_categorical(std::span<const double> probabilities, Rng& rng);

/// JSON text form: {"states", "actions", "cost", "discount", "initial",
/// "terminal", "transitions": [[s, a, s', p, (r)]...], "rewards": [[s, a, r]...]}.
/// Transition entries without a reward take R(s, a) from "rewards" (default 0).
TabularAcnoMdp parse_mdp(const std::string& text);
std::string format_mdp(const TabularAcnoMdp& mdp);
TabularAcnoMdp load_mdp(const std::filesystem::path& path);
void save_mdp(const TabularAcnoMdp& mdp, const std::filesystem::path& path);

}  // namespace acno
