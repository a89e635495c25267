#pragma once

#include "mococo/fuzzy.hpp"

#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

namespace mococo {

struct McState {
  double position = -0.5;
  double velocity = 0.0;

  friend bool operator==(const McState&, const McState&) = default;
};

/// Classic-control Mountain Car with two actions: 1 = push left, 2 = push right.
struct McConfig {
  Interval positionBounds{-1.2, 0.5};
  Interval velocityBounds{-0.07, 0.07};
  double goalPosition = 0.5;
  double force = 0.001;
  double gravity = 0.0025;
  int maxSteps = 200;
  double stepReward = -1.0;

  static constexpr int kNumActions = 2;

  /// Lowest possible return (every step rewarded, goal never reached).
  double returnLowerBound() const noexcept { return stepReward * maxSteps; }
};

struct McStep {
  McState state;
  double reward = -1.0;
  bool atGoal = false;
};

McStep mcStep(const McState& s, Action action, const McConfig& config = {});

/// Fixed set of start states drawn uniformly from x in [-0.6, -0.4], v = 0.
struct InitialStateSet {
  std::uint64_t seed = 0;
  std::vector<McState> states;
};

InitialStateSet sampleInitialStates(std::uint64_t seed, std::size_t count);

/// Maps a state to an action, or nullopt when the state is not covered.
using Policy = std::function<std::optional<Action>(const McState&)>;

Policy frbsPolicy(const Frbs& frbs);

/// Undiscounted return of one episode; nullopt on coverage failure.
std::optional<double> rollout(const Policy& policy, McState start, const McConfig& config = {});

struct PerfResult {
  double perf = 0.0;
  bool failed = false;
};

/// Mean return over the start states. Any coverage failure sets the whole
/// result to the environment's lower bound.
PerfResult evalPerformance(const Policy& policy, const InitialStateSet& starts, const McConfig& config = {});

}  // namespace mococo
