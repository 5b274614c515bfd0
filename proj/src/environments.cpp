#include "acno/environments.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace acno {

TabularAcnoMdp build_measuring_value(const MeasuringValueSpec& spec) {
  using namespace mv_env;
  if (!(spec.p >= 0.0 && spec.p <= 1.0)) {
    throw std::invalid_argument("measuring-value: p must lie in [0, 1]");
  }
  constexpr std::size_t S = 4;
  constexpr std::size_t A = 2;
  MdpData d;
  d.state_count = S;
  d.action_count = A;
  d.transition.assign(S * A * S, 0.0);
  d.reward.assign(S * A * S, 0.0);
  auto at = [](StateId s, ActionId a, StateId n) { return (s * A + a) * S + n; };

  for (StateId s : {kStart, kPlus, kMinus}) d.transition[at(s, kReturn, kStart)] = 1.0;
  d.transition[at(kStart, kAdvance, kPlus)] = spec.p;
  d.transition[at(kStart, kAdvance, kMinus)] = 1.0 - spec.p;
  d.transition[at(kPlus, kAdvance, kEnd)] = 1.0;
  d.reward[at(kPlus, kAdvance, kEnd)] = 1.0;
  d.transition[at(kMinus, kAdvance, kEnd)] = 1.0;

  d.measure_cost = spec.cost;
  d.discount = spec.discount;
  d.initial = {1.0, 0.0, 0.0, 0.0};
  d.terminal = {false, false, false, true};
  d.r_max = 1.0;
  return TabularAcnoMdp(std::move(d));
}

double analytic_measuring_return(double p, double cost, double discount, int n_max) {
  if (discount == 1.0 && p == 0.0) {
    throw std::invalid_argument("measuring-value series diverges for discount = 1, p = 0");
  }
  if (n_max < 0) throw std::invalid_argument("n_max must be non-negative");
  double total = 0.0;
  double weight = p;  // discount^{2n} p (1-p)^n
  const double ratio = discount * discount * (1.0 - p);
  for (int n = 0; n <= n_max; ++n) {
    total += weight * (1.0 - cost * (n + 1));
    weight *= ratio;
  }
  return total;
}

// --- Frozen lake -------------------------------------------------------------

namespace {

struct Cell {
  int row;
  int col;
};

Cell shift(Cell c, ActionId dir, int n) {
  switch (dir) {
    case lake_action::kLeft:
      c.col = std::max(c.col - 1, 0);
      break;
    case lake_action::kDown:
      c.row = std::min(c.row + 1, n - 1);
      break;
    case lake_action::kRight:
      c.col = std::min(c.col + 1, n - 1);
      break;
    case lake_action::kUp:
      c.row = std::max(c.row - 1, 0);
      break;
    default:
      break;
  }
  return c;
}

bool is_terminal_tile(char t) { return t == 'H' || t == 'G'; }

std::pair<int, int> find_start(const std::vector<std::string>& grid) {
  for (int r = 0; r < static_cast<int>(grid.size()); ++r)
    for (int c = 0; c < static_cast<int>(grid[r].size()); ++c)
      if (grid[r][c] == 'S') return {r, c};
  return {-1, -1};
}

}  // namespace

int lake_shortest_path(const std::vector<std::string>& grid) {
  const int n = static_cast<int>(grid.size());
  auto [sr, sc] = find_start(grid);
  if (sr < 0) return -1;
  std::vector<int> dist(static_cast<std::size_t>(n * n), -1);
  std::deque<Cell> queue;
  dist[static_cast<std::size_t>(sr * n + sc)] = 0;
  queue.push_back({sr, sc});
  while (!queue.empty()) {
    const Cell cur = queue.front();
    queue.pop_front();
    const int d = dist[static_cast<std::size_t>(cur.row * n + cur.col)];
    if (grid[cur.row][cur.col] == 'G') return d;
    for (ActionId dir = 0; dir < 4; ++dir) {
      const Cell nxt = shift(cur, dir, n);
      const auto k = static_cast<std::size_t>(nxt.row * n + nxt.col);
      if (dist[k] >= 0 || grid[nxt.row][nxt.col] == 'H') continue;
      dist[k] = d + 1;
      queue.push_back(nxt);
    }
  }
  return -1;
}

bool lake_goal_reachable(const std::vector<std::string>& grid) {
  return lake_shortest_path(grid) >= 0;
}

void validate_lake(const FrozenLakeSpec& spec) {
  const auto& g = spec.grid;
  const std::size_t n = g.size();
  if (n == 0) throw std::invalid_argument("frozen lake: empty grid");
  int starts = 0;
  int goals = 0;
  for (const auto& row : g) {
    if (row.size() != n) throw std::invalid_argument("frozen lake: grid must be square");
    for (char t : row) {
      switch (t) {
        case 'S': ++starts; break;
        case 'G': ++goals; break;
        case 'F':
        case 'H': break;
        default:
          throw std::invalid_argument(std::string("frozen lake: unknown tile '") + t + "'");
      }
    }
  }
  if (starts != 1) throw std::invalid_argument("frozen lake: need exactly one start tile");
  if (goals == 0) throw std::invalid_argument("frozen lake: need at least one goal tile");
  if (!lake_goal_reachable(g)) throw std::invalid_argument("frozen lake: goal unreachable from start");
  if (!(spec.cost >= 0.0)) throw std::invalid_argument("frozen lake: cost must be >= 0");
}

TabularAcnoMdp build_frozen_lake(const FrozenLakeSpec& spec) {
  validate_lake(spec);
  const int n = static_cast<int>(spec.grid.size());
  const std::size_t S = static_cast<std::size_t>(n * n);
  constexpr std::size_t A = 4;
  MdpData d;
  d.state_count = S;
  d.action_count = A;
  d.transition.assign(S * A * S, 0.0);
  d.reward.assign(S * A * S, 0.0);
  d.terminal.assign(S, false);
  d.initial.assign(S, 0.0);

  auto state_of = [n](Cell c) { return static_cast<StateId>(c.row * n + c.col); };
  for (int r = 0; r < n; ++r) {
    for (int c = 0; c < n; ++c) {
      const StateId s = state_of({r, c});
      const char tile = spec.grid[r][c];
      if (tile == 'S') d.initial[s] = 1.0;
      if (is_terminal_tile(tile)) {
        d.terminal[s] = true;
        continue;  // absorbing rows are filled in by the constructor
      }
      for (ActionId a = 0; a < A; ++a) {
        std::vector<std::pair<Cell, double>> landings;
        switch (spec.variant) {
          case LakeVariant::kDeterministic:
            landings.push_back({shift({r, c}, a, n), 1.0});
            break;
          case LakeVariant::kSlippery:
            for (ActionId dir : {(a + 3) % 4, a, (a + 1) % 4})
              landings.push_back({shift({r, c}, dir, n), 1.0 / 3.0});
            break;
          case LakeVariant::kSemiSlippery: {
            const Cell one = shift({r, c}, a, n);
            landings.push_back({one, 0.5});
            landings.push_back({shift(one, a, n), 0.5});
            break;
          }
        }
        for (const auto& [cell, prob] : landings) {
          const StateId next = state_of(cell);
          const std::size_t k = (s * A + a) * S + next;
          d.transition[k] += prob;
          d.reward[k] = spec.grid[cell.row][cell.col] == 'G' ? 1.0 : 0.0;
        }
      }
    }
  }
  d.measure_cost = spec.cost;
  d.discount = spec.discount;
  d.r_max = 1.0;
  return TabularAcnoMdp(std::move(d));
}

std::vector<std::string> standard_map(const std::string& name) {
  if (name == "4x4") return {"SFFF", "FHFH", "FFFH", "HFFG"};
  if (name == "8x8") {
    return {"SFFFFFFF", "FFFFFFFF", "FFFHFFFF", "FFFFFHFF",
            "FFFHFFFF", "FHHFFFHF", "FHFFHFHF", "FFFHFFFG"};
  }
  throw std::invalid_argument("unknown standard map '" + name + "' (expected 4x4 or 8x8)");
}

std::vector<std::string> generate_random_map(int n, std::uint64_t seed, double frozen_prob,
                                             int max_attempts) {
  if (n < 4) throw std::invalid_argument("random map size must be at least 4");
  if (!(frozen_prob >= 0.0 && frozen_prob <= 1.0)) {
    throw std::invalid_argument("frozen_prob must lie in [0, 1]");
  }
  Rng rng(seed);
  for (int attempt = 0; attempt < max_attempts; ++attempt) {
    std::vector<std::string> grid(static_cast<std::size_t>(n), std::string(static_cast<std::size_t>(n), 'F'));
    for (auto& row : grid)
      for (char& t : row) t = uniform01(rng) < frozen_prob ? 'F' : 'H';
    grid.front().front() = 'S';
    grid.back().back() = 'G';
    if (lake_goal_reachable(grid)) return grid;
  }
  throw std::runtime_error("random map: no connected map after " + std::to_string(max_attempts) +
                           " attempts");
}

std::vector<std::string> parse_map(const std::string& text) {
  std::vector<std::string> grid;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    while (!line.empty() && (line.back() == '\r' || line.back() == ' ')) line.pop_back();
    if (line.empty()) continue;
    grid.push_back(line);
  }
  return grid;
}

std::string format_map(const std::vector<std::string>& grid) {
  std::string out;
  for (const auto& row : grid) {
    out += row;
    out += '\n';
  }
  return out;
}

std::vector<std::string> load_map(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open map file " + path.string());
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_map(buffer.str());
}

void save_map(const std::vector<std::string>& grid, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write map file " + path.string());
  out << format_map(grid);
}

LakeVariant parse_variant(const std::string& name) {
  if (name == "deterministic") return LakeVariant::kDeterministic;
  if (name == "semi-slippery") return LakeVariant::kSemiSlippery;
  if (name == "slippery") return LakeVariant::kSlippery;
  throw std::invalid_argument("unknown lake variant '" + name +
                              "' (deterministic, semi-slippery, slippery)");
}

std::string variant_name(LakeVariant v) {
  switch (v) {
    case LakeVariant::kDeterministic: return "deterministic";
    case LakeVariant::kSemiSlippery: return "semi-slippery";
    case LakeVariant::kSlippery: return "slippery";
  }
  return "unknown";
}

// --- Heuristic failure example -----------------------------------------------

TabularAcnoMdp build_fig4_example(double cost, double eps, double discount) {
  using namespace fig4;
  if (!(cost >= 0.0 && cost <= 0.5)) throw std::invalid_argument("fig4 example needs cost in [0, 0.5]");
  if (!(eps >= 0.0 && eps < 1.0)) throw std::invalid_argument("fig4 example needs eps in [0, 1)");
  constexpr std::size_t S = 4;
  constexpr std::size_t A = 2;
  MdpData d;
  d.state_count = S;
  d.action_count = A;
  d.transition.assign(S * A * S, 0.0);
  d.reward.assign(S * A * S, 0.0);
  auto at = [](StateId s, ActionId a, StateId n) { return (s * A + a) * S + n; };

  d.transition[at(kStart, kA, kSafe)] = 1.0;
  d.transition[at(kStart, kB, kLeft)] = 0.5;
  d.transition[at(kStart, kB, kRight)] = 0.5;
  for (ActionId a : {kA, kB}) {
    d.transition[at(kSafe, a, kSafe)] = 1.0;
    d.reward[at(kSafe, a, kSafe)] = 1.0 - eps;
    for (StateId hidden : {kLeft, kRight}) {
      const bool pays = (hidden == kLeft && a == kA) || (hidden == kRight && a == kB);
      for (StateId next : {kLeft, kRight}) {
        d.transition[at(hidden, a, next)] = 0.5;
        d.reward[at(hidden, a, next)] = pays ? 1.0 : 0.0;
      }
    }
  }
  d.measure_cost = cost;
  d.discount = discount;
  d.initial = {1.0, 0.0, 0.0, 0.0};
  d.r_max = 1.0;
  return TabularAcnoMdp(std::move(d));
}

TabularAcnoMdp build_chain(std::size_t n, double cost, double discount) {
  if (n < 1) throw std::invalid_argument("chain needs at least one state");
  MdpData d;
  d.state_count = n;
  d.action_count = 2;
  d.transition.assign(n * 2 * n, 0.0);
  d.reward.assign(n * 2 * n, 0.0);
  for (StateId s = 0; s < n; ++s) {
    const StateId ahead = std::min(s + 1, n - 1);
    d.transition[(s * 2 + 0) * n + ahead] = 1.0;
    d.reward[(s * 2 + 0) * n + ahead] = s + 1 == n ? 1.0 : 0.0;
    d.transition[(s * 2 + 1) * n + 0] = 1.0;
    d.reward[(s * 2 + 1) * n + 0] = 0.2;
  }
  d.measure_cost = cost;
  d.discount = discount;
  d.initial.assign(n, 0.0);
  d.initial[0] = 1.0;
  d.r_max = 1.0;
  return TabularAcnoMdp(std::move(d));
}

}  // namespace acno
