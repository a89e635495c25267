#pragma once

// Hand-rolled generators shared by the property tests.

#include "mococo/genotype.hpp"
#include "mococo/nsga.hpp"

#include <random>
#include <vector>

namespace gen {

using Engine = std::mt19937;

inline double uniform(Engine& e, double lo = 0.0, double hi = 1.0) {
  return std::uniform_real_distribution<double>(lo, hi)(e);
}

inline int uniformInt(Engine& e, int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(e); }

inline mococo::SubspeciesTag tag(Engine& e, int dims, int maxSets = 6) {
  std::vector<int> m(static_cast<std::size_t>(dims));
  for (auto& x : m) x = uniformInt(e, 2, maxSets);
  return mococo::SubspeciesTag(m);
}

// Biased toward the ends of [0,1] so degenerate placements get exercised.
inline double allele(Engine& e) {
  switch (uniformInt(e, 0, 9)) {
    case 0: return 0.0;
    case 1: return 1.0;
    default: return uniform(e);
  }
}

inline mococo::DbGenotype dbGenotype(Engine& e, const mococo::SubspeciesTag& t) {
  std::vector<double> a(mococo::dbGenotypeLength(t));
  for (auto& x : a) x = allele(e);
  return {t, a};
}

inline mococo::RbGenotype rbGenotype(Engine& e, const mococo::SubspeciesTag& t, int k, double pUnspec) {
  std::vector<int> a(mococo::rbGenotypeLength(t));
  for (auto& x : a) x = uniform(e) < pUnspec ? 0 : uniformInt(e, 1, k);
  return {t, k, a};
}

inline std::vector<mococo::Interval> domains(Engine& e, std::size_t d) {
  std::vector<mococo::Interval> out;
  for (std::size_t i = 0; i < d; ++i) {
    const double lo = uniform(e, -5.0, 5.0);
    out.push_back({lo, lo + uniform(e, 0.01, 10.0)});
  }
  return out;
}

// Small integer-valued grid so duplicates and ties are common.
inline std::vector<mococo::ObjectivePoint> objectivePoints(Engine& e, int n) {
  std::vector<mococo::ObjectivePoint> pts;
  for (int i = 0; i < n; ++i) pts.push_back({-200.0 + 8.0 * uniformInt(e, 0, 13), uniformInt(e, 2, 25)});
  return pts;
}

}  // namespace gen
