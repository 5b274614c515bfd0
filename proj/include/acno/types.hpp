#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>

namespace acno {

using StateId = std::size_t;
using ActionId = std::size_t;

/// Whether the successor state is observed on this step.
enum class Measure : std::uint8_t { kSkip = 0, kObserve = 1 };

inline bool observes(Measure m) { return m == Measure::kObserve; }
inline Measure measure_from(bool observe) {
  return observe ? Measure::kObserve : Measure::kSkip;
}

/// Control action paired with a measurement choice.
struct ActionPair {
  ActionId control = 0;
  Measure measure = Measure::kSkip;

  friend bool operator==(const ActionPair&, const ActionPair&) = default;
};

/// Either the full successor state (measured) or nothing.
using Observation = std::optional<StateId>;

/// Raised when a caller breaks an operation's contract (e.g. stepping a
/// terminal state). Distinct from invalid_argument so tests can tell them apart.
class ContractViolation : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

}  // namespace acno
