#pragma once

#include "mococo/fuzzy.hpp"
#include "mococo/tag.hpp"

#include <cstdint>
#include <span>
#include <vector>

namespace mococo {

inline constexpr double kDefaultValidFraction = 0.75;

/// Genotype length of the DB species: one reference coordinate per fuzzy set.
std::size_t dbGenotypeLength(const SubspeciesTag& tag);

/// Genotype length of the RB species: one gene per fuzzy subspace.
std::size_t rbGenotypeLength(const SubspeciesTag& tag);

/// Reference-coordinate fractions in [0,1], grouped per feature in order.
struct DbGenotype {
  DbGenotype(SubspeciesTag tag, std::vector<double> alleles);

  SubspeciesTag tag;
  std::vector<double> alleles;

  friend bool operator==(const DbGenotype&, const DbGenotype&) = default;
};

/// Action advocated in each fuzzy subspace (0 = unspecified). Subspaces are
/// enumerated with the first feature outermost and the last varying fastest.
struct RbGenotype {
  RbGenotype(SubspeciesTag tag, int numActions, std::vector<int> alleles);

  SubspeciesTag tag;
  int numActions = 2;
  std::vector<int> alleles;

  friend bool operator==(const RbGenotype&, const RbGenotype&) = default;
};

/// Place m reference coordinates inside the valid (central `validFraction`)
/// region of m equal subdomains and build the partition through them.
FuzzyPartition decodePartition(std::span<const double> fractions, Interval domain, double validFraction);

DataBase decodeDb(const DbGenotype& genotype, std::span<const Interval> domains,
                  double validFraction = kDefaultValidFraction);

/// Per-feature set indices of the subspace at gene position `gene`.
std::vector<int> subspaceOf(const SubspeciesTag& tag, std::size_t gene);

/// Elementary rules from every specified gene, then pairwise merging of
/// same-action rules that differ in exactly one clause, until no pair merges.
RuleBase decodeRb(const RbGenotype& genotype);

/// Number of specified alleles.
int genotypicComplexity(const RbGenotype& genotype);

struct ComplexityBounds {
  int min = 0;
  int max = 0;

  friend bool operator==(const ComplexityBounds&, const ComplexityBounds&) = default;
};

ComplexityBounds complexityBounds(std::span<const SubspeciesTag> tags, int numActions);

}  // namespace mococo
