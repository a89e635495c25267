#include "mococo/genotype.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>

namespace mococo {

std::size_t dbGenotypeLength(const SubspeciesTag& tag) {
  const auto& g = tag.granularities();
  return static_cast<std::size_t>(std::accumulate(g.begin(), g.end(), 0));
}

std::size_t rbGenotypeLength(const SubspeciesTag& tag) {
  std::size_t product = 1;
  for (int m : tag.granularities()) product *= static_cast<std::size_t>(m);
  return product;
}

DbGenotype::DbGenotype(SubspeciesTag t, std::vector<double> a) : tag(std::move(t)), alleles(std::move(a)) {
  if (alleles.size() != dbGenotypeLength(tag)) {
    throw std::invalid_argument("DB genotype length " + std::to_string(alleles.size()) + " does not fit tag " +
                                tag.label());
  }
  for (double v : alleles) {
    if (!(v >= 0.0 && v <= 1.0)) throw std::invalid_argument("DB allele outside [0,1]");
  }
}

RbGenotype::RbGenotype(SubspeciesTag t, int k, std::vector<int> a)
    : tag(std::move(t)), numActions(k), alleles(std::move(a)) {
  if (numActions < 1) throw std::invalid_argument("RB genotype needs at least one action");
  if (alleles.size() != rbGenotypeLength(tag)) {
    throw std::invalid_argument("RB genotype length " + std::to_string(alleles.size()) + " does not fit tag " +
                                tag.label());
  }
  for (int v : alleles) {
    if (v < 0 || v > numActions) throw std::invalid_argument("RB allele outside {0..k}");
  }
}

FuzzyPartition decodePartition(std::span<const double> fractions, Interval domain, double validFraction) {
  if (!(validFraction > 0.0 && validFraction <= 1.0)) throw std::invalid_argument("valid fraction outside (0,1]");
  const std::size_t m = fractions.size();
  if (m < 2) throw std::invalid_argument("a partition needs at least two reference coordinates");

  const double width = domain.width() / static_cast<double>(m);
  const double validWidth = validFraction * width;
  const double margin = 0.5 * (1.0 - validFraction) * width;

  std::vector<double> refs(m);
  for (std::size_t j = 0; j < m; ++j) {
    refs[j] = domain.lo + static_cast<double>(j) * width + margin + fractions[j] * validWidth;
  }

  std::vector<FuzzySet> sets;
  sets.reserve(m);
  sets.push_back({SetShape::LowerTrapezoid, domain.lo, refs[0], refs[1]});
  for (std::size_t j = 1; j + 1 < m; ++j) sets.push_back({SetShape::Triangle, refs[j - 1], refs[j], refs[j + 1]});
  sets.push_back({SetShape::UpperTrapezoid, refs[m - 2], refs[m - 1], domain.hi});
  return FuzzyPartition(domain, std::move(sets));
}

DataBase decodeDb(const DbGenotype& genotype, std::span<const Interval> domains, double validFraction) {
  const auto& tag = genotype.tag;
  if (domains.size() != tag.dims()) throw std::invalid_argument("feature domain count does not match tag");
  DataBase db{tag, {}};
  db.partitions.reserve(tag.dims());
  std::size_t offset = 0;
  for (std::size_t i = 0; i < tag.dims(); ++i) {
    const auto m = static_cast<std::size_t>(tag[i]);
    db.partitions.push_back(
        decodePartition(std::span(genotype.alleles).subspan(offset, m), domains[i], validFraction));
    offset += m;
  }
  return db;
}

std::vector<int> subspaceOf(const SubspeciesTag& tag, std::size_t gene) {
  std::vector<int> idx(tag.dims());
  for (std::size_t i = tag.dims(); i-- > 0;) {
    const auto m = static_cast<std::size_t>(tag[i]);
    idx[i] = static_cast<int>(gene % m);
    gene /= m;
  }
  return idx;
}

namespace {

// Index of the single differing clause, or -1 if the masks differ in zero or
// several clauses.
int soleDifference(const CnfRule& a, const CnfRule& b) {
  int diff = -1;
  for (std::size_t i = 0; i < a.masks.size(); ++i) {
    if (a.masks[i] == b.masks[i]) continue;
    if (diff >= 0) return -1;
    diff = static_cast<int>(i);
  }
  return diff;
}

bool mergeOnce(std::vector<CnfRule>& rules) {
  for (std::size_t i = 0; i < rules.size(); ++i) {
    for (std::size_t j = i + 1; j < rules.size(); ++j) {
      if (rules[i].action != rules[j].action) continue;
      const int clause = soleDifference(rules[i], rules[j]);
      if (clause < 0) continue;
      rules[i].masks[static_cast<std::size_t>(clause)] |= rules[j].masks[static_cast<std::size_t>(clause)];
      rules.erase(rules.begin() + static_cast<std::ptrdiff_t>(j));
      return true;
    }
  }
  return false;
}

}  // namespace

RuleBase decodeRb(const RbGenotype& genotype) {
  RuleBase rb{genotype.tag, genotype.numActions, {}};
  for (std::size_t gene = 0; gene < genotype.alleles.size(); ++gene) {
    if (genotype.alleles[gene] == 0) continue;
    CnfRule rule;
    rule.action = genotype.alleles[gene];
    for (int j : subspaceOf(genotype.tag, gene)) rule.masks.push_back(std::uint32_t{1} << j);
    rb.rules.push_back(std::move(rule));
  }
  while (mergeOnce(rb.rules)) {
  }
  return rb;
}

int genotypicComplexity(const RbGenotype& genotype) {
  return static_cast<int>(std::count_if(genotype.alleles.begin(), genotype.alleles.end(), [](int a) { return a != 0; }));
}

ComplexityBounds complexityBounds(std::span<const SubspeciesTag> tags, int numActions) {
  if (tags.empty()) throw std::invalid_argument("complexity bounds need at least one subspecies tag");
  std::size_t longest = 0;
  for (const auto& tag : tags) longest = std::max(longest, rbGenotypeLength(tag));
  const ComplexityBounds bounds{numActions, static_cast<int>(longest)};
  if (bounds.min > bounds.max) throw std::invalid_argument("every RB genotype is shorter than the action count");
  return bounds;
}

}  // namespace mococo
