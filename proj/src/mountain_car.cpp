#include "mococo/mountain_car.hpp"

#include "mococo/rng.hpp"

#include <array>
#include <cmath>
#include <stdexcept>

namespace mococo {

McStep mcStep(const McState& s, Action action, const McConfig& config) {
  double push = 0.0;
  switch (action) {
    case 1: push = -config.force; break;
    case 2: push = config.force; break;
    default: throw std::invalid_argument("mountain car action must be 1 or 2, got " + std::to_string(action));
  }
  McState next;
  next.velocity = config.velocityBounds.clamp(s.velocity + push - config.gravity * std::cos(3.0 * s.position));
  next.position = config.positionBounds.clamp(s.position + next.velocity);
  if (next.position == config.positionBounds.lo && next.velocity < 0.0) next.velocity = 0.0;
  return {next, config.stepReward, next.position >= config.goalPosition};
}

InitialStateSet sampleInitialStates(std::uint64_t seed, std::size_t count) {
  if (count == 0) throw std::invalid_argument("need at least one initial state");
  Rng rng(seed);
  std::uniform_real_distribution<double> position(-0.6, -0.4);
  InitialStateSet set{seed, {}};
  set.states.reserve(count);
  for (std::size_t i = 0; i < count; ++i) set.states.push_back({position(rng), 0.0});
  return set;
}

Policy frbsPolicy(const Frbs& frbs) {
  return [&frbs](const McState& s) {
    const std::array<double, 2> x{s.position, s.velocity};
    return frbs.selectAction(x);
  };
}

std::optional<double> rollout(const Policy& policy, McState start, const McConfig& config) {
  double total = 0.0;
  McState s = start;
  for (int t = 0; t < config.maxSteps; ++t) {
    const auto action = policy(s);
    if (!action) return std::nullopt;
    const auto step = mcStep(s, *action, config);
    total += step.reward;
    if (step.atGoal) break;
    s = step.state;
  }
  return total;
}

PerfResult evalPerformance(const Policy& policy, const InitialStateSet& starts, const McConfig& config) {
  if (starts.states.empty()) throw std::invalid_argument("performance evaluation needs initial states");
  double sum = 0.0;
  for (const auto& s0 : starts.states) {
    const auto ret = rollout(policy, s0, config);
    if (!ret) return {config.returnLowerBound(), true};
    sum += *ret;
  }
  return {sum / static_cast<double>(starts.states.size()), false};
}

}  // namespace mococo
