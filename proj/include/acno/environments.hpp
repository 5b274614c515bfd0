#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "acno/mdp.hpp"

namespace acno {

// --- Measuring-value environment -------------------------------------------

/// Three decision states s0, s+, s- plus an absorbing end state.
struct MeasuringValueSpec {
  double p = 0.8;
  double cost = 0.05;
  double discount = 1.0;
};

namespace mv_env {
inline constexpr StateId kStart = 0;
inline constexpr StateId kPlus = 1;
inline constexpr StateId kMinus = 2;
inline constexpr StateId kEnd = 3;
inline constexpr ActionId kReturn = 0;  // a0
inline constexpr ActionId kAdvance = 1; // a1
}  // namespace mv_env

TabularAcnoMdp build_measuring_value(const MeasuringValueSpec& spec);

/// Expected scalarized return of the always-measure-after-a1 strategy:
/// sum_{n=0}^{n_max} discount^{2n} p (1-p)^n (1 - cost (n+1)).
/// Throws std::invalid_argument for the divergent case discount = 1, p = 0.
double analytic_measuring_return(double p, double cost, double discount, int n_max);

// --- Frozen lake -------------------------------------------------------------

enum class LakeVariant { kDeterministic, kSemiSlippery, kSlippery };

/// Actions follow the usual frozen-lake ordering.
namespace lake_action {
inline constexpr ActionId kLeft = 0;
inline constexpr ActionId kDown = 1;
inline constexpr ActionId kRight = 2;
inline constexpr ActionId kUp = 3;
}  // namespace lake_action

/// Square grid of 'S', 'F', 'H', 'G' characters, one string per row.
struct FrozenLakeSpec {
  std::vector<std::string> grid;
  LakeVariant variant = LakeVariant::kDeterministic;
  double cost = 0.05;
  double discount = 0.95;
};

/// Throws std::invalid_argument when the grid is not square, does not have
/// exactly one start, has no goal, contains unknown characters, or when no
/// goal is reachable from the start by walking over non-hole cells.
void validate_lake(const FrozenLakeSpec& spec);

/// State index of grid cell (row, col) is row * n + col.
TabularAcnoMdp build_frozen_lake(const FrozenLakeSpec& spec);

std::vector<std::string> standard_map(const std::string& name);  // "4x4" or "8x8"

/// Start at the top-left, goal at the bottom-right, every other cell frozen
/// with probability frozen_prob. Regenerates until the goal is reachable;
/// throws std::runtime_error after max_attempts failures.
std::vector<std::string> generate_random_map(int n, std::uint64_t seed, double frozen_prob,
                                             int max_attempts = 10000);

/// Breadth-first reachability from the start over non-hole cells.
bool lake_goal_reachable(const std::vector<std::string>& grid);

/// Length (in moves) of the shortest start-to-goal walk, or -1.
int lake_shortest_path(const std::vector<std::string>& grid);

std::vector<std::string> parse_map(const std::string& text);
std::string format_map(const std::vector<std::string>& grid);
std::vector<std::string> load_map(const std::filesystem::path& path);
void save_map(const std::vector<std::string>& grid, const std::filesystem::path& path);

LakeVariant parse_variant(const std::string& name);
std::string variant_name(LakeVariant v);

// --- Heuristic failure example -----------------------------------------------

/// From s0, action a leads to s_eps, which pays 1 - eps per step without any
/// uncertainty. Action b leads to s_a or s_b with equal probability; the hidden
/// state is redrawn uniformly every step and only the matching action (a in
/// s_a, b in s_b) pays 1. With full information the b-branch is worth slightly
/// more, so act-then-measure commits to it and then has to pay for a
/// measurement every step.
namespace fig4 {
inline constexpr StateId kStart = 0;
inline constexpr StateId kSafe = 1;   // s_eps
inline constexpr StateId kLeft = 2;   // s_a
inline constexpr StateId kRight = 3;  // s_b
inline constexpr ActionId kA = 0;
inline constexpr ActionId kB = 1;
}  // namespace fig4

TabularAcnoMdp build_fig4_example(double cost, double eps = 1e-9, double discount = 0.95);

// --- Deterministic chain -------------------------------------------------------

/// States 0..n-1 with no terminal. Action 0 advances one state (staying put at
/// the end) and pays 1 only when taken in the last state; action 1 jumps back
/// to state 0 and pays 0.2.
TabularAcnoMdp build_chain(std::size_t n, double cost = 0.05, double discount = 0.95);

}  // namespace acno
