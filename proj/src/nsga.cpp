#include "mococo/nsga.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>

namespace mococo {

bool dominates(const ObjectivePoint& a, const ObjectivePoint& b) noexcept {
  const bool noWorse = a.perf >= b.perf && a.complexity <= b.complexity;
  const bool better = a.perf > b.perf || a.complexity < b.complexity;
  return noWorse && better;
}

std::vector<int> fastNonDominatedSort(std::span<const ObjectivePoint> points) {
  const std::size_t n = points.size();
  std::vector<std::vector<std::size_t>> dominated(n);
  std::vector<int> dominationCount(n, 0);
  std::vector<int> rank(n, 0);

  std::vector<std::size_t> front;
  for (std::size_t p = 0; p < n; ++p) {
    for (std::size_t q = p + 1; q < n; ++q) {
      if (dominates(points[p], points[q])) {
        dominated[p].push_back(q);
        ++dominationCount[q];
      } else if (dominates(points[q], points[p])) {
        dominated[q].push_back(p);
        ++dominationCount[p];
      }
    }
  }
  for (std::size_t p = 0; p < n; ++p) {
    if (dominationCount[p] == 0) {
      rank[p] = 1;
      front.push_back(p);
    }
  }

  int current = 1;
  while (!front.empty()) {
    std::vector<std::size_t> next;
    for (std::size_t p : front) {
      for (std::size_t q : dominated[p]) {
        if (--dominationCount[q] == 0) {
          rank[q] = current + 1;
          next.push_back(q);
        }
      }
    }
    ++current;
    front = std::move(next);
  }
  return rank;
}

std::vector<double> crowdingDistances(std::span<const ObjectivePoint> front, const ObjectiveBounds& bounds) {
  constexpr double kInf = std::numeric_limits<double>::infinity();
  const std::size_t n = front.size();
  std::vector<double> dist(n, 0.0);
  if (n <= 2) {
    std::fill(dist.begin(), dist.end(), kInf);
    return dist;
  }

  auto accumulate = [&](auto value, double width) {
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return value(a) < value(b); });
    dist[order.front()] = kInf;
    dist[order.back()] = kInf;
    for (std::size_t k = 1; k + 1 < n; ++k) {
      if (width > 0.0) dist[order[k]] += (value(order[k + 1]) - value(order[k - 1])) / width;
    }
  };
  accumulate([&](std::size_t i) { return front[i].perf; }, bounds.perfWidth());
  accumulate([&](std::size_t i) { return static_cast<double>(front[i].complexity); }, bounds.complexityWidth());
  return dist;
}

std::vector<MoAnnotation> annotate(std::span<const ObjectivePoint> points, const ObjectiveBounds& bounds) {
  const auto ranks = fastNonDominatedSort(points);
  std::vector<MoAnnotation> out(points.size());
  const int maxRank = ranks.empty() ? 0 : *std::max_element(ranks.begin(), ranks.end());
  std::vector<std::vector<std::size_t>> fronts(static_cast<std::size_t>(maxRank));
  for (std::size_t i = 0; i < points.size(); ++i) fronts[static_cast<std::size_t>(ranks[i] - 1)].push_back(i);

  std::vector<ObjectivePoint> members;
  for (const auto& front : fronts) {
    members.clear();
    for (auto i : front) members.push_back(points[i]);
    const auto dist = crowdingDistances(members, bounds);
    for (std::size_t k = 0; k < front.size(); ++k) out[front[k]] = {ranks[front[k]], dist[k]};
  }
  return out;
}

std::vector<std::size_t> crowdedComparisonOrder(std::span<const MoAnnotation> annotations) {
  std::vector<std::size_t> order(annotations.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return crowdedLess(annotations[a], annotations[b]); });
  return order;
}

std::size_t crowdedBest(std::span<const MoAnnotation> annotations) {
  if (annotations.empty()) throw std::invalid_argument("crowdedBest of an empty collection");
  std::size_t best = 0;
  for (std::size_t i = 1; i < annotations.size(); ++i) {
    if (crowdedLess(annotations[i], annotations[best])) best = i;
  }
  return best;
}

std::vector<std::size_t> crowdedBestTies(std::span<const MoAnnotation> annotations) {
  const auto& best = annotations[crowdedBest(annotations)];
  std::vector<std::size_t> ties;
  for (std::size_t i = 0; i < annotations.size(); ++i) {
    if (!crowdedLess(best, annotations[i])) ties.push_back(i);
  }
  return ties;
}

}  // namespace mococo
