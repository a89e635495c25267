#pragma once

#include "mococo/tag.hpp"

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

namespace mococo {

/// Actions are numbered 1..k.
using Action = int;

struct Interval {
  double lo = 0.0;
  double hi = 1.0;

  double width() const noexcept { return hi - lo; }
  double clamp(double x) const noexcept { return x < lo ? lo : (x > hi ? hi : x); }
  friend bool operator==(const Interval&, const Interval&) = default;
};

enum class SetShape : std::uint8_t { LowerTrapezoid, Triangle, UpperTrapezoid };

/// Piecewise-linear fuzzy set described by three increasing breakpoints.
///
/// `core` is where the set reaches membership 1 next to its sloped side(s):
///  - LowerTrapezoid: 1 on [left, core], falls to 0 at `right`.
///  - Triangle: 0 at `left`, peak at `core`, 0 at `right`.
///  - UpperTrapezoid: 0 at `left`, rises to 1 at `core`, 1 on [core, right].
/// For trapezoids the plateau end that touches the domain boundary is the
/// domain limit itself.
struct FuzzySet {
  SetShape shape = SetShape::Triangle;
  double left = 0.0;
  double core = 0.5;
  double right = 1.0;

  friend bool operator==(const FuzzySet&, const FuzzySet&) = default;
};

double membership(const FuzzySet& set, double x) noexcept;

/// Ordered fuzzy sets over one feature domain: lower trapezoid, zero or more
/// triangles, upper trapezoid.
class FuzzyPartition {
public:
  FuzzyPartition(Interval domain, std::vector<FuzzySet> sets);

  const Interval& domain() const noexcept { return domain_; }
  const std::vector<FuzzySet>& sets() const noexcept { return sets_; }
  std::size_t size() const noexcept { return sets_.size(); }

  /// Membership of the domain-clamped input in every set, written to `out`
  /// (which must hold size() values).
  void memberships(double x, std::span<double> out) const noexcept;
  std::vector<double> memberships(double x) const;

  /// A point where set `j` has membership 1 and every other set 0.
  double prototype(std::size_t j) const;

  friend bool operator==(const FuzzyPartition&, const FuzzyPartition&) = default;

private:
  Interval domain_;
  std::vector<FuzzySet> sets_;
};

struct DataBase {
  SubspeciesTag tag;
  std::vector<FuzzyPartition> partitions;

  friend bool operator==(const DataBase&, const DataBase&) = default;
};

/// CNF rule in GABIL form: one bit mask of selected linguistic values per
/// feature (bit j = set j), voting for a single action.
struct CnfRule {
  std::vector<std::uint32_t> masks;
  Action action = 1;

  friend bool operator==(const CnfRule&, const CnfRule&) = default;
};

struct RuleBase {
  SubspeciesTag tag;
  int numActions = 2;
  std::vector<CnfRule> rules;

  friend bool operator==(const RuleBase&, const RuleBase&) = default;
};

/// Zero-order TSK fuzzy rule-based system; usable as a policy.
class Frbs {
public:
  Frbs(DataBase db, RuleBase rb);

  const DataBase& db() const noexcept { return db_; }
  const RuleBase& rb() const noexcept { return rb_; }
  std::size_t dims() const noexcept { return db_.partitions.size(); }

  /// Normalised vote per action (index a-1 holds g_a). nullopt when no rule
  /// fires, i.e. the input is not covered.
  std::optional<std::vector<double>> votingStrengths(std::span<const double> x) const;

  /// argmax of the voting strengths, lowest action on ties.
  std::optional<Action> selectAction(std::span<const double> x) const;

private:
  // Flattened memberships of every set of every feature.
  void fillMemberships(std::span<const double> x, std::span<double> out) const;
  bool accumulateVotes(std::span<const double> x, std::span<double> votes) const;

  DataBase db_;
  RuleBase rb_;
  std::vector<std::size_t> offsets_;
  std::size_t totalSets_ = 0;
};

/// min over clauses of (max membership over the clause's selected sets).
/// `memberships[i]` holds the degrees of feature i.
double firingStrength(const CnfRule& rule, std::span<const std::vector<double>> memberships);

/// Number of fuzzy subspaces covered by the rule: product of mask popcounts.
std::int64_t decisionPoints(const CnfRule& rule);

/// Total decision points of a rule base (sum over rules).
std::int64_t phenotypicComplexity(const RuleBase& rb);

}  // namespace mococo
