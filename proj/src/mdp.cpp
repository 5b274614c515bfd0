#include "acno/mdp.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace acno {
namespace {

constexpr double kRowTolerance = 1e-9;

[[noreturn]] void reject(const std::string& what) {
  throw std::invalid_argument("invalid ACNO-MDP: " + what);
}

}  // namespace

TabularAcnoMdp::TabularAcnoMdp(MdpData data) : data_(std::move(data)) {
  const std::size_t S = data_.state_count;
  const std::size_t A = data_.action_count;
  if (S == 0) reject("state_count must be positive");
  if (A == 0) reject("action_count must be positive");
  if (data_.transition.size() != S * A * S) reject("transition table has wrong size");
  if (data_.reward.empty()) data_.reward.assign(S * A * S, 0.0);
  if (data_.reward.size() != S * A * S) reject("reward table has wrong size");
  if (!(data_.measure_cost >= 0.0) || !std::isfinite(data_.measure_cost))
    reject("measure_cost must be finite and >= 0");
  if (!(data_.discount >= 0.0 && data_.discount <= 1.0)) reject("discount must lie in [0, 1]");
  if (data_.terminal.empty()) data_.terminal.assign(S, false);
  if (data_.terminal.size() != S) reject("terminal flags have wrong size");

  if (data_.initial.empty()) {
    data_.initial.assign(S, 0.0);
    data_.initial[0] = 1.0;
  }
  if (data_.initial.size() != S) reject("initial distribution has wrong size");
  double initial_sum = 0.0;
  for (double p : data_.initial) {
    if (!(p >= 0.0)) reject("initial distribution has a negative entry");
    initial_sum += p;
  }
  if (std::abs(initial_sum - 1.0) > kRowTolerance) reject("initial distribution does not sum to 1");

  for (StateId s = 0; s < S; ++s) {
    if (!data_.terminal[s]) continue;
    for (ActionId a = 0; a < A; ++a) {
      for (StateId n = 0; n < S; ++n) {
        data_.transition[index(s, a, n)] = (n == s) ? 1.0 : 0.0;
        data_.reward[index(s, a, n)] = 0.0;
      }
    }
  }

  expected_reward_.assign(S * A, 0.0);
  double max_reward = -std::numeric_limits<double>::infinity();
  for (StateId s = 0; s < S; ++s) {
    for (ActionId a = 0; a < A; ++a) {
      double sum = 0.0;
      double expected = 0.0;
      for (StateId n = 0; n < S; ++n) {
        const double p = data_.transition[index(s, a, n)];
        const double r = data_.reward[index(s, a, n)];
        if (!(p >= 0.0) || !std::isfinite(p)) {
          reject("negative or non-finite probability at (" + std::to_string(s) + ", " +
                 std::to_string(a) + ", " + std::to_string(n) + ")");
        }
        if (!std::isfinite(r)) reject("non-finite reward");
        sum += p;
        expected += p * r;
        if (p > 0.0) max_reward = std::max(max_reward, r);
      }
      if (std::abs(sum - 1.0) > kRowTolerance) {
        reject("transition row (" + std::to_string(s) + ", " + std::to_string(a) +
               ") sums to " + std::to_string(sum));
      }
      expected_reward_[s * A + a] = expected;
    }
  }
  data_.r_max = std::max(data_.r_max, max_reward);
}

TabularAcnoMdp TabularAcnoMdp::with_cost(double cost) const {
  MdpData copy = data_;
  copy.measure_cost = cost;
  return TabularAcnoMdp(std::move(copy));
}

TabularAcnoMdp TabularAcnoMdp::with_discount(double discount) const {
  MdpData copy = data_;
  copy.discount = discount;
  return TabularAcnoMdp(std::move(copy));
}

StateId TabularAcnoMdp::sample_initial(Rng& rng) const {
  return sample_categorical(data_.initial, rng);
}

double scalarize(double reward, Measure measure, double cost) {
  return observes(measure) ? reward - cost : reward;
}

std::size_t sample_categorical(std::span<const double> probabilities, Rng& rng) {
  const double u = uniform01(rng);
  double cumulative = 0.0;
  std::size_t last_positive = 0;
  for (std::size_t i = 0; i < probabilities.size(); ++i) {
    if (probabilities[i] <= 0.0) continue;
    cumulative += probabilities[i];
    last_positive = i;
    if (u < cumulative) return i;
  }
  // Rounding left u above the accumulated mass.
  return last_positive;
}

std::pair<StepOutcome, StateId> step(const TabularAcnoMdp& mdp, StateId state,
                                     ActionPair pair, Rng& rng) {
  if (state >= mdp.state_count()) throw ContractViolation("state index out of range");
  if (pair.control >= mdp.action_count()) throw ContractViolation("action index out of range");
  if (mdp.is_terminal(state)) {
    throw ContractViolation("step called on terminal state " + std::to_string(state));
  }
  const StateId next = sample_categorical(mdp.transition_row(state, pair.control), rng);
  StepOutcome out;
  out.reward = mdp.reward(state, pair.control, next);
  out.cost = observes(pair.measure) ? mdp.measure_cost() : 0.0;
  out.scalarized = scalarize(out.reward, pair.measure, mdp.measure_cost());
  out.done = mdp.is_terminal(next);
  if (observes(pair.measure)) out.observation = next;
  return {out, next};
}

namespace {

MdpData mdp_data_from_json(const nlohmann::json& j) {
  MdpData d;
  d.state_count = j.at("states").get<std::size_t>();
  d.action_count = j.at("actions").get<std::size_t>();
  const std::size_t S = d.state_count;
  const std::size_t A = d.action_count;
  d.measure_cost = j.value("cost", 0.0);
  d.discount = j.value("discount", 1.0);
  d.r_max = j.value("r_max", 0.0);
  d.transition.assign(S * A * S, 0.0);
  d.reward.assign(S * A * S, 0.0);
  auto check_index = [](std::size_t v, std::size_t bound, const char* name) {
    if (v >= bound) throw std::invalid_argument(std::string("MDP file: ") + name + " out of range");
  };

  std::vector<double> sa_reward(S * A, 0.0);
  if (j.contains("rewards")) {
    for (const auto& e : j.at("rewards")) {
      const auto s = e.at(0).get<std::size_t>();
      const auto a = e.at(1).get<std::size_t>();
      check_index(s, S, "state");
      check_index(a, A, "action");
      sa_reward[s * A + a] = e.at(2).get<double>();
    }
  }
  std::vector<bool> explicit_reward(S * A * S, false);
  for (const auto& e : j.at("transitions")) {
    const auto s = e.at(0).get<std::size_t>();
    const auto a = e.at(1).get<std::size_t>();
    const auto n = e.at(2).get<std::size_t>();
    check_index(s, S, "state");
    check_index(a, A, "action");
    check_index(n, S, "successor");
    const std::size_t k = (s * A + a) * S + n;
    d.transition[k] += e.at(3).get<double>();
    if (e.size() > 4) {
      d.reward[k] = e.at(4).get<double>();
      explicit_reward[k] = true;
    }
  }
  for (std::size_t s = 0; s < S; ++s)
    for (std::size_t a = 0; a < A; ++a)
      for (std::size_t n = 0; n < S; ++n) {
        const std::size_t k = (s * A + a) * S + n;
        if (!explicit_reward[k]) d.reward[k] = sa_reward[s * A + a];
      }

  if (j.contains("initial")) {
    const auto& init = j.at("initial");
    if (init.is_number_integer()) {
      const auto s0 = init.get<std::size_t>();
      check_index(s0, S, "initial state");
      d.initial.assign(S, 0.0);
      d.initial[s0] = 1.0;
    } else {
      d.initial = init.get<std::vector<double>>();
    }
  }
  d.terminal.assign(S, false);
  if (j.contains("terminal")) {
    for (const auto& t : j.at("terminal")) {
      const auto s = t.get<std::size_t>();
      check_index(s, S, "terminal state");
      d.terminal[s] = true;
    }
  }
  return d;
}

}  // namespace

TabularAcnoMdp parse_mdp(const std::string& text) {
  using nlohmann::json;
  MdpData d;
  try {
    d = mdp_data_from_json(json::parse(text));
  } catch (const json::exception& e) {
    throw std::invalid_argument(std::string("malformed MDP file: ") + e.what());
  }
  return TabularAcnoMdp(std::move(d));
}

std::string format_mdp(const TabularAcnoMdp& mdp) {
  using nlohmann::json;
  const std::size_t S = mdp.state_count();
  const std::size_t A = mdp.action_count();
  json j;
  j["states"] = S;
  j["actions"] = A;
  j["cost"] = mdp.measure_cost();
  j["discount"] = mdp.discount();
  j["r_max"] = mdp.r_max();
  j["initial"] = mdp.initial_distribution();
  json terminals = json::array();
  for (StateId s = 0; s < S; ++s)
    if (mdp.is_terminal(s)) terminals.push_back(s);
  j["terminal"] = terminals;
  json transitions = json::array();
  for (StateId s = 0; s < S; ++s)
    for (ActionId a = 0; a < A; ++a)
      for (StateId n = 0; n < S; ++n) {
        const double p = mdp.transition(s, a, n);
        if (p > 0.0) transitions.push_back({s, a, n, p, mdp.reward(s, a, n)});
      }
  j["transitions"] = transitions;
  return j.dump(1);
}

TabularAcnoMdp load_mdp(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open MDP file " + path.string());
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_mdp(buffer.str());
}

void save_mdp(const TabularAcnoMdp& mdp, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write MDP file " + path.string());
  out << format_mdp(mdp) << '\n';
}

}  // namespace acno
