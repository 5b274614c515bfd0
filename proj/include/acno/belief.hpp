#pragma once

#include <concepts>
#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include "acno/rng.hpp"
#include "acno/types.hpp"

namespace acno {

/// Anything that can answer P(next | s, a): the true model or a learned one.
template <typename T>
concept TransitionSource = requires(const T& t, StateId s, ActionId a) {
  { t.state_count() } -> std::convertible_to<std::size_t>;
  { t.probability(s, a, s) } -> std::convertible_to<double>;
};

/// Sparse distribution over states, sorted by state id.
///
/// `particle_count` is N_b for beliefs produced by sampling and 0 for exact
/// ones; sampled beliefs only carry multiples of 1/N_b.
class Belief {
 public:
  using Entry = std::pair<StateId, double>;

  Belief() = default;

  /// Point mass on `s`.
  static Belief collapse(StateId s);

  /// Builds from a dense vector, dropping zero entries and normalising.
  /// Throws std::invalid_argument if the mass is not positive.
  static Belief from_dense(const std::vector<double>& dense, std::size_t particle_count = 0);

  /// Builds from sparse entries (duplicates merged), normalising.
  static Belief from_entries(std::vector<Entry> entries, std::size_t particle_count = 0);

  const std::vector<Entry>& support() const { return entries_; }
  std::size_t size() const { return entries_.size(); }
  bool empty() const { return entries_.empty(); }
  std::size_t particle_count() const { return particle_count_; }

  double probability(StateId s) const;
  bool is_deterministic() const { return entries_.size() == 1; }
  /// The state carrying all mass, if the belief is a point mass.
  Observation certain_state() const;

  double total_mass() const;
  std::vector<double> to_dense(std::size_t state_count) const;
  std::string to_string() const;

  friend bool operator==(const Belief&, const Belief&) = default;

 private:
  std::vector<Entry> entries_;
  std::size_t particle_count_ = 0;
};

/// Exact pushforward sum_s b(s) P(. | s, a) as a dense vector.
template <TransitionSource Model>
std::vector<double> pushforward(const Model& model, const Belief& b, ActionId a) {
  const std::size_t S = model.state_count();
  std::vector<double> next(S, 0.0);
  for (const auto& [s, w] : b.support()) {
    for (StateId n = 0; n < S; ++n) next[n] += w * model.probability(s, a, n);
  }
  return next;
}

template <TransitionSource Model>
Belief predict_exact(const Model& model, const Belief& b, ActionId a) {
  return Belief::from_dense(pushforward(model, b, a));
}

/// N_b independent draws from the exact pushforward, each worth 1/N_b.
/// Throws std::invalid_argument when particle_count is zero.
Belief sample_from(const std::vector<double>& distribution, std::size_t particle_count, Rng& rng);

template <TransitionSource Model>
Belief sample_next(const Model& model, const Belief& b, ActionId a, std::size_t particle_count,
                   Rng& rng) {
  return sample_from(pushforward(model, b, a), particle_count, rng);
}

/// Total-variation distance between two beliefs.
double total_variation(const Belief& x, const Belief& y);

}  // namespace acno
