#include "acno/dirichlet_model.hpp"

#include <fstream>
#include <iomanip>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace acno {

DirichletModel::DirichletModel(std::size_t state_count, std::size_t action_count)
    : state_count_(state_count), action_count_(action_count) {
  if (state_count == 0 || action_count == 0) {
    throw std::invalid_argument("DirichletModel: empty state or action space");
  }
  const double prior = 1.0 / static_cast<double>(state_count);
  alpha_.assign(state_count * action_count * state_count, prior);
  alpha_sum_.assign(state_count * action_count, static_cast<double>(state_count) * prior);
  reward_avg_.assign(state_count * action_count, 0.0);
  reward_count_.assign(state_count * action_count, 0);
}

void DirichletModel::record_measured_transition(StateId s, ActionId a, StateId next, double reward) {
  if (s >= state_count_ || next >= state_count_ || a >= action_count_) {
    throw std::out_of_range("DirichletModel: index out of range");
  }
  const std::size_t sa = s * action_count_ + a;
  alpha_[sa * state_count_ + next] += 1.0;
  alpha_sum_[sa] += 1.0;
  const auto n = static_cast<double>(reward_count_[sa]);
  reward_avg_[sa] = (reward_avg_[sa] * n + reward) / (n + 1.0);
  ++reward_count_[sa];
}

std::vector<double> DirichletModel::estimated_p(StateId s, ActionId a) const {
  std::vector<double> p(state_count_);
  const double total = measured_visits(s, a);
  for (StateId n = 0; n < state_count_; ++n) p[n] = alpha(s, a, n) / total;
  return p;
}

std::string DirichletModel::serialize() const {
  std::ostringstream out;
  out << std::setprecision(std::numeric_limits<double>::max_digits10);
  out << "dirichlet " << state_count_ << ' ' << action_count_ << '\n';
  for (StateId s = 0; s < state_count_; ++s) {
    for (ActionId a = 0; a < action_count_; ++a) {
      const std::size_t sa = s * action_count_ + a;
      out << s << ' ' << a << ' ' << reward_count_[sa] << ' ' << reward_avg_[sa];
      for (StateId n = 0; n < state_count_; ++n) out << ' ' << alpha_[sa * state_count_ + n];
      out << '\n';
    }
  }
  return out.str();
}

DirichletModel DirichletModel::deserialize(const std::string& text) {
  std::istringstream in(text);
  std::string tag;
  std::size_t S = 0;
  std::size_t A = 0;
  if (!(in >> tag >> S >> A) || tag != "dirichlet") {
    throw std::invalid_argument("DirichletModel checkpoint: bad header");
  }
  DirichletModel m(S, A);
  for (std::size_t row = 0; row < S * A; ++row) {
    std::size_t s = 0;
    std::size_t a = 0;
    if (!(in >> s >> a) || s >= S || a >= A) {
      throw std::invalid_argument("DirichletModel checkpoint: bad row index");
    }
    const std::size_t sa = s * A + a;
    in >> m.reward_count_[sa] >> m.reward_avg_[sa];
    for (StateId n = 0; n < S; ++n) in >> m.alpha_[sa * S + n];
    if (!in) throw std::invalid_argument("DirichletModel checkpoint: truncated row");
    // Replay the increments so the total matches a live model bit for bit.
    for (std::size_t k = 0; k < m.reward_count_[sa]; ++k) m.alpha_sum_[sa] += 1.0;
  }
  return m;
}

void DirichletModel::save(const std::filesystem::path& path) const {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << serialize();
}

DirichletModel DirichletModel::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open " + path.string());
  std::stringstream buffer;
  buffer << in.rdbuf();
  return deserialize(buffer.str());
}

}  // namespace acno
