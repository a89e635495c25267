#pragma once

#include "mococo/mountain_car.hpp"

#include <cstdint>
#include <filesystem>
#include <vector>

namespace mococo {

/// Greedy action table over an equal-width bins x bins grid of the state
/// space. Queried by containing-bin lookup.
class DiscretePolicy {
public:
  DiscretePolicy(int bins, Interval positionBounds, Interval velocityBounds, std::vector<std::uint8_t> actions);

  int bins() const noexcept { return bins_; }
  const Interval& positionBounds() const noexcept { return positionBounds_; }
  const Interval& velocityBounds() const noexcept { return velocityBounds_; }
  const std::vector<std::uint8_t>& actions() const noexcept { return actions_; }

  Action operator()(const McState& s) const noexcept;

  /// Binary table: "MCVIPOL1", uint32 bins, four float64 bounds
  /// (xlo, xhi, vlo, vhi), then bins*bins uint8 actions, position-major.
  /// Little-endian.
  void save(const std::filesystem::path& path) const;
  static DiscretePolicy load(const std::filesystem::path& path);

  friend bool operator==(const DiscretePolicy&, const DiscretePolicy&) = default;

private:
  int bins_;
  Interval positionBounds_;
  Interval velocityBounds_;
  std::vector<std::uint8_t> actions_;
};

/// Index of the bin containing `x`, clamped to [0, bins).
int containingBin(double x, const Interval& bounds, int bins) noexcept;

struct ValueIterationResult {
  DiscretePolicy policy;
  std::vector<double> values;     // position-major, bins*bins
  std::vector<double> residuals;  // max Bellman residual per sweep
  PerfResult perf;
};

/// Value iteration on the discretised environment. Transitions are applied
/// from bin centres and snapped to the containing bin; stepping into the goal
/// is absorbing with value 0. Values are floored at the episode lower bound,
/// which keeps bins that cannot reach the goal finite. The greedy policy is
/// then scored on the continuous environment from `starts`.
ValueIterationResult valueIterationOracle(int bins, double convergenceTol, const InitialStateSet& starts,
                                          const McConfig& config = {});

}  // namespace mococo
