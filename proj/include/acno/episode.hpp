#pragma once

#include <cstddef>
#include <cstdint>

namespace acno {

/// Per-episode metrics. Returns are undiscounted in-episode sums.
struct EpisodeRecord {
  std::size_t repetition = 0;
  std::size_t episode = 0;
  double scalarized_return = 0.0;  // sum of r - C(m)
  double raw_return = 0.0;         // sum of r
  std::size_t measurements = 0;
  std::size_t steps = 0;
  bool truncated = false;          // hit the step cap before termination
  std::uint64_t seed = 0;

  friend bool operator==(const EpisodeRecord&, const EpisodeRecord&) = default;
};

}  // namespace acno
