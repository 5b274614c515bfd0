#pragma once

#include <cstddef>
#include <filesystem>
#include <string>
#include <vector>

#include "acno/types.hpp"

namespace acno {

/// Bayesian transition model learned from measured transitions only.
///
/// Every count starts at 1/|S|, so each (s, a) row carries one unit of prior
/// mass and `measured_visits` is (number of recorded transitions + 1). The
/// model also keeps the running mean of rewards seen on measured steps, which
/// Dyna training uses as its simulated reward.
class DirichletModel {
 public:
  DirichletModel(std::size_t state_count, std::size_t action_count);

  std::size_t state_count() const { return state_count_; }
  std::size_t action_count() const { return action_count_; }

  /// Only call when the agent knew s for certain and measured the successor.
  void record_measured_transition(StateId s, ActionId a, StateId next, double reward);

  double alpha(StateId s, ActionId a, StateId next) const {
    return alpha_[(s * action_count_ + a) * state_count_ + next];
  }
  /// Sum of alpha over successors (prior mass included).
  double measured_visits(StateId s, ActionId a) const { return alpha_sum_[s * action_count_ + a]; }
  std::size_t recorded_count(StateId s, ActionId a) const { return reward_count_[s * action_count_ + a]; }
  double reward_avg(StateId s, ActionId a) const { return reward_avg_[s * action_count_ + a]; }

  /// Posterior mean alpha(s, a, next) / alpha_sum(s, a).
  double probability(StateId s, ActionId a, StateId next) const {
    return alpha(s, a, next) / measured_visits(s, a);
  }
  std::vector<double> estimated_p(StateId s, ActionId a) const;

  /// Plain-text checkpoint: header line "dirichlet S A", then one line per
  /// (s, a): "s a reward_count reward_avg alpha_0 ... alpha_{S-1}".
  std::string serialize() const;
  static DirichletModel deserialize(const std::string& text);
  void save(const std::filesystem::path& path) const;
  static DirichletModel load(const std::filesystem::path& path);

  friend bool operator==(const DirichletModel&, const DirichletModel&) = default;

 private:
  std::size_t state_count_;
  std::size_t action_count_;
  std::vector<double> alpha_;
  std::vector<double> alpha_sum_;
  std::vector<double> reward_avg_;
  std::vector<std::size_t> reward_count_;
};

}  // namespace acno
