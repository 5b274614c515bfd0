#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <map>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "acno/atmq_agent.hpp"
#include "acno/belief.hpp"
#include "acno/mdp.hpp"

namespace acno {

/// Raised when the belief tree outgrows the configured node budget.
class BudgetExceeded : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Infinite-horizon Q_MDP by value iteration (terminal states are worth 0).
/// Throws std::runtime_error if the sup-norm residual is still >= tol after
/// max_iterations sweeps.
QTable value_iteration(const TabularAcnoMdp& mdp, double tol = 1e-10,
                       std::size_t max_iterations = 1'000'000);

/// Finite-horizon Q_MDP: element k holds the values with k steps to go
/// (element 0 is all zeros).
std::vector<QTable> finite_horizon_q(const TabularAcnoMdp& mdp, std::size_t horizon);

enum class MeasureRule {
  kMeasuringValue,  // exact measuring value: measure iff Q(b,<a,1>) >= Q(b,<a,0>)
  kApproxMv,        // measuring value with Q_MDP standing in for Q_ATM
  kAlways,
  kNever,
  kPsi,             // caller-supplied psi: belief -> m
};

/// Control actions always follow the act-then-measure rule on Q_MDP.
struct PolicySpec {
  MeasureRule rule = MeasureRule::kMeasuringValue;
  std::function<Measure(const Belief&)> psi;  // only read for kPsi

  static PolicySpec measuring_value() { return {MeasureRule::kMeasuringValue, {}}; }
  static PolicySpec approx_mv() { return {MeasureRule::kApproxMv, {}}; }
  static PolicySpec always() { return {MeasureRule::kAlways, {}}; }
  static PolicySpec never() { return {MeasureRule::kNever, {}}; }
  static PolicySpec table(std::function<Measure(const Belief&)> psi) {
    return {MeasureRule::kPsi, std::move(psi)};
  }
};

struct Evaluation {
  double value = 0.0;             // expected discounted scalarized return
  double truncation_bound = 0.0;  // discount^H R_max / (1 - discount); inf when discount = 1
  std::size_t nodes = 0;          // distinct (belief, steps-to-go) nodes expanded
};

/// Counters gathered while evaluating the exact measuring-value policy.
struct NodeStats {
  std::size_t decision_nodes = 0;     // nodes where the predicted belief is not a point mass
  std::size_t approx_overestimates = 0;  // Q_MDP-based MV >= exact MV
  std::size_t approx_violations = 0;     // Q_MDP-based MV < exact MV - 1e-9
  std::size_t linearity_checked = 0;
  std::size_t linearity_agree = 0;   // both forms of the belief-optimal pair agree
  double worst_underestimate = 0.0;  // max(exact - approx) over violations
};

/// Exact finite-horizon belief-tree evaluation on a known model.
///
/// Beliefs advance by the exact pushforward. The end-of-episode signal is
/// observable, so an unmeasured step splits into "episode ended" and the
/// renormalised non-terminal part. Nodes are memoised on the belief (rounded
/// to 1e-12) and the number of steps to go.
class ExactPlanner {
 public:
  ExactPlanner(const TabularAcnoMdp& mdp, std::size_t horizon,
               std::size_t node_budget = 2'000'000);

  const TabularAcnoMdp& mdp() const { return mdp_; }
  std::size_t horizon() const { return horizon_; }
  const std::vector<QTable>& qmdp() const { return qmdp_; }

  /// argmax_a sum_s b(s) Q_MDP^k(s, a), lowest index on ties.
  ActionId atm_control(const Belief& b, std::size_t steps_to_go) const;

  /// Value of following `policy` from the initial distribution for the full horizon.
  Evaluation evaluate(const PolicySpec& policy) const;
  double value(const PolicySpec& policy, const Belief& b, std::size_t steps_to_go) const;

  /// Best value over all history-dependent policies (any <a, m> at every node).
  Evaluation optimal() const;

  /// Exact measuring value at (b, a) with k steps to go under the exact
  /// measuring-value policy afterwards.
  double exact_measuring_value(const Belief& b, ActionId a, std::size_t steps_to_go) const;

  /// Walks every node the exact measuring-value policy can reach (under both
  /// measurement choices) and compares the Q_MDP approximation of the
  /// measuring value and the two forms of the belief-optimal pair.
  NodeStats node_statistics() const;

  /// Beliefs reachable under act-then-measure control with any measurement
  /// choices, without the steps-to-go component.
  std::vector<Belief> reachable_beliefs() const;

  Belief initial_belief() const;

 private:
  struct Key {
    std::size_t steps;
    std::vector<std::pair<StateId, long long>> mass;
    friend auto operator<=>(const Key&, const Key&) = default;
  };
  using Memo = std::map<Key, double>;

  static Key key(const Belief& b, std::size_t steps);

  double pair_value(const PolicySpec& policy, Memo& memo, const Belief& b, std::size_t k,
                    ActionId a, Measure m) const;
  double policy_value(const PolicySpec& policy, Memo& memo, const Belief& b, std::size_t k) const;
  double optimal_value(Memo& memo, const Belief& b, std::size_t k) const;
  double optimal_pair_value(Memo& memo, const Belief& b, std::size_t k, ActionId a,
                            Measure m) const;
  double approx_mv(const Belief& b, ActionId a, std::size_t k) const;
  void check_budget(const Memo& memo) const;
  Evaluation finish(double value, const Memo& memo) const;

  TabularAcnoMdp mdp_;
  std::size_t horizon_;
  std::size_t node_budget_;
  std::vector<QTable> qmdp_;
};

/// Split of the exact pushforward into terminal mass and the renormalised
/// non-terminal belief (empty when everything terminates).
struct Successors {
  double terminal_mass = 0.0;
  std::vector<double> next;  // dense pushforward
  Belief continuing;
};
Successors split_successors(const TabularAcnoMdp& mdp, const Belief& b, ActionId a);

// --- verification ----------------------------------------------------------

struct TheoremReport {
  double v_star = 0.0;
  double v_atm = 0.0;
  double v_measure = 0.0;     // always measure with act-then-measure control
  double v_free_star = 0.0;   // optimum of the zero-cost copy
  double loss = 0.0;          // v_star - v_atm
  double bound = 0.0;         // sum_{t<H} discount^t cost
  bool pass = false;
};

/// Loss of the exact act-then-measure policy against the brute-force optimum,
/// compared with sum_{t<H} discount^t cost (plus 1e-6 slack).
TheoremReport verify_theorem_bound(const TabularAcnoMdp& mdp, std::size_t horizon);

struct LemmaReport {
  double v_atm = 0.0;
  double best_alternative = 0.0;
  double v_always = 0.0;
  double v_never = 0.0;
  std::size_t reachable = 0;     // distinct reachable beliefs
  std::size_t alternatives = 0;  // psi tables evaluated
  bool enumerated = false;       // every psi table was tried
  std::size_t violations = 0;
  bool pass = false;
};

/// Compares the exact measuring-value policy against belief-keyed psi tables:
/// all of them when there are at most `max_tables`, else `max_tables` random
/// ones (always including all-measure and never-measure).
LemmaReport verify_lemma_mv_optimal(const TabularAcnoMdp& mdp, std::size_t horizon,
                                    std::size_t max_tables, std::uint64_t seed);

/// Random tiny ACNO-MDP: 2..max_states states, 1..max_actions actions,
/// sparse random transitions, rewards in [0, 1], cost in [0, 0.3], discount
/// in [0.8, 1], and (half the time) one terminal state.
TabularAcnoMdp random_tiny_mdp(std::uint64_t seed, std::size_t max_states = 4,
                               std::size_t max_actions = 2);

}  // namespace acno
