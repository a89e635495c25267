#pragma once

#include <cstddef>
#include <limits>
#include <span>
#include <vector>

namespace mococo {

/// Objective pair: performance is maximised, complexity minimised.
struct ObjectivePoint {
  double perf = 0.0;
  int complexity = 0;

  friend bool operator==(const ObjectivePoint&, const ObjectivePoint&) = default;
};

/// Fixed objective ranges used to normalise crowding distances.
struct ObjectiveBounds {
  double perfMin = -200.0;
  double perfMax = -96.0;
  int complexityMin = 2;
  int complexityMax = 25;

  double perfWidth() const noexcept { return perfMax - perfMin; }
  double complexityWidth() const noexcept { return static_cast<double>(complexityMax - complexityMin); }
};

struct MoAnnotation {
  int rank = 1;  // 1 = non-dominated front
  double crowding = std::numeric_limits<double>::infinity();

  friend bool operator==(const MoAnnotation&, const MoAnnotation&) = default;
};

bool dominates(const ObjectivePoint& a, const ObjectivePoint& b) noexcept;

/// Pareto front index per point (NSGA-II fast non-dominated sort).
std::vector<int> fastNonDominatedSort(std::span<const ObjectivePoint> points);

/// NSGA-II crowding distance within one front, normalised by the global
/// bounds. Per objective, points are ordered by (value, input position); the
/// first and last get +inf.
std::vector<double> crowdingDistances(std::span<const ObjectivePoint> front, const ObjectiveBounds& bounds);

/// Ranks plus per-front crowding distances for a whole collection.
std::vector<MoAnnotation> annotate(std::span<const ObjectivePoint> points, const ObjectiveBounds& bounds);

/// Crowded-comparison: lower rank first, then larger crowding distance.
inline bool crowdedLess(const MoAnnotation& a, const MoAnnotation& b) noexcept {
  if (a.rank != b.rank) return a.rank < b.rank;
  return a.crowding > b.crowding;
}

/// Indices ordered by crowded comparison, stable on exact ties.
std::vector<std::size_t> crowdedComparisonOrder(std::span<const MoAnnotation> annotations);

/// Position of the crowded-comparison best element (first on ties).
std::size_t crowdedBest(std::span<const MoAnnotation> annotations);

/// Every position tied with the crowded-comparison best, ascending.
std::vector<std::size_t> crowdedBestTies(std::span<const MoAnnotation> annotations);

}  // namespace mococo
