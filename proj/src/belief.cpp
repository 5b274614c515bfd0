#include "acno/belief.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace acno {

Belief Belief::collapse(StateId s) {
  Belief b;
  b.entries_.push_back({s, 1.0});
  return b;
}

Belief Belief::from_dense(const std::vector<double>& dense, std::size_t particle_count) {
  std::vector<Entry> entries;
  for (StateId s = 0; s < dense.size(); ++s) {
    if (dense[s] > 0.0) entries.push_back({s, dense[s]});
  }
  return from_entries(std::move(entries), particle_count);
}

Belief Belief::from_entries(std::vector<Entry> entries, std::size_t particle_count) {
  std::sort(entries.begin(), entries.end(),
            [](const Entry& x, const Entry& y) { return x.first < y.first; });
  Belief b;
  b.particle_count_ = particle_count;
  double mass = 0.0;
  for (const auto& [s, w] : entries) {
    if (!(w >= 0.0) || !std::isfinite(w)) throw std::invalid_argument("belief: invalid weight");
    if (w == 0.0) continue;
    if (!b.entries_.empty() && b.entries_.back().first == s) {
      b.entries_.back().second += w;
    } else {
      b.entries_.push_back({s, w});
    }
    mass += w;
  }
  if (!(mass > 0.0)) throw std::invalid_argument("belief: no probability mass");
  if (b.entries_.size() == 1) {
    b.entries_.front().second = 1.0;
  } else if (std::abs(mass - 1.0) > 1e-12) {
    for (auto& e : b.entries_) e.second /= mass;
  }
  return b;
}

double Belief::probability(StateId s) const {
  auto it = std::lower_bound(entries_.begin(), entries_.end(), s,
                             [](const Entry& e, StateId key) { return e.first < key; });
  return (it != entries_.end() && it->first == s) ? it->second : 0.0;
}

Observation Belief::certain_state() const {
  if (entries_.size() == 1) return entries_.front().first;
  return std::nullopt;
}

double Belief::total_mass() const {
  double m = 0.0;
  for (const auto& e : entries_) m += e.second;
  return m;
}

std::vector<double> Belief::to_dense(std::size_t state_count) const {
  std::vector<double> dense(state_count, 0.0);
  for (const auto& [s, w] : entries_) dense.at(s) = w;
  return dense;
}

std::string Belief::to_string() const {
  std::ostringstream out;
  out << '{';
  for (std::size_t i = 0; i < entries_.size(); ++i) {
    if (i) out << ", ";
    out << 's' << entries_[i].first << ": " << entries_[i].second;
  }
  out << '}';
  return out.str();
}

Belief sample_from(const std::vector<double>& distribution, std::size_t particle_count, Rng& rng) {
  if (particle_count == 0) throw std::invalid_argument("sample_next: particle count must be >= 1");
  std::vector<double> cumulative(distribution.size(), 0.0);
  double running = 0.0;
  for (std::size_t i = 0; i < distribution.size(); ++i) {
    running += distribution[i];
    cumulative[i] = running;
  }
  if (!(running > 0.0)) throw std::invalid_argument("sample_next: empty pushforward");

  std::vector<std::size_t> counts(distribution.size(), 0);
  for (std::size_t i = 0; i < particle_count; ++i) {
    const double u = uniform01(rng) * running;
    auto it = std::upper_bound(cumulative.begin(), cumulative.end(), u);
    std::size_t idx = static_cast<std::size_t>(it - cumulative.begin());
    if (idx >= distribution.size()) idx = distribution.size() - 1;
    // Skip zero-width buckets that upper_bound can land on after rounding.
    while (idx > 0 && distribution[idx] <= 0.0) --idx;
    ++counts[idx];
  }
  std::vector<Belief::Entry> entries;
  const double unit = 1.0 / static_cast<double>(particle_count);
  for (StateId s = 0; s < counts.size(); ++s) {
    if (counts[s] > 0) entries.push_back({s, static_cast<double>(counts[s]) * unit});
  }
  return Belief::from_entries(std::move(entries), particle_count);
}

double total_variation(const Belief& x, const Belief& y) {
  double sum = 0.0;
  std::size_t i = 0;
  std::size_t j = 0;
  const auto& a = x.support();
  const auto& b = y.support();
  while (i < a.size() || j < b.size()) {
    if (j == b.size() || (i < a.size() && a[i].first < b[j].first)) {
      sum += a[i++].second;
    } else if (i == a.size() || b[j].first < a[i].first) {
      sum += b[j++].second;
    } else {
      sum += std::abs(a[i++].second - b[j++].second);
    }
  }
  return 0.5 * sum;
}

}  // namespace acno
