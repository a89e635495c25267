#include "mococo/fuzzy.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <stdexcept>

namespace mococo {

namespace {

constexpr std::size_t kInlineCapacity = 128;

// Stack buffer for the common small case, heap otherwise.
class Scratch {
public:
  explicit Scratch(std::size_t n) {
    if (n > kInlineCapacity) heap_.resize(n);
    view_ = n > kInlineCapacity ? std::span<double>(heap_) : std::span<double>(inline_).first(n);
  }
  std::span<double> view() noexcept { return view_; }

private:
  std::array<double, kInlineCapacity> inline_;
  std::vector<double> heap_;
  std::span<double> view_;
};

}  // namespace

double membership(const FuzzySet& set, double x) noexcept {
  switch (set.shape) {
    case SetShape::LowerTrapezoid:
      if (x <= set.core) return 1.0;
      if (x >= set.right) return 0.0;
      return (set.right - x) / (set.right - set.core);
    case SetShape::UpperTrapezoid:
      if (x >= set.core) return 1.0;
      if (x <= set.left) return 0.0;
      return (x - set.left) / (set.core - set.left);
    case SetShape::Triangle:
      if (x <= set.left || x >= set.right) return 0.0;
      if (x <= set.core) return (x - set.left) / (set.core - set.left);
      return (set.right - x) / (set.right - set.core);
  }
  return 0.0;
}

FuzzyPartition::FuzzyPartition(Interval domain, std::vector<FuzzySet> sets)
    : domain_(domain), sets_(std::move(sets)) {
  if (!(domain_.lo < domain_.hi)) throw std::invalid_argument("fuzzy partition domain is empty");
  if (sets_.size() < 2) throw std::invalid_argument("fuzzy partition needs at least two sets");
  for (std::size_t j = 0; j < sets_.size(); ++j) {
    const auto& s = sets_[j];
    const SetShape expected = j == 0                  ? SetShape::LowerTrapezoid
                              : j + 1 == sets_.size() ? SetShape::UpperTrapezoid
                                                      : SetShape::Triangle;
    if (s.shape != expected) throw std::invalid_argument("fuzzy partition set shapes out of order");
    const bool ordered = s.left <= s.core && s.core <= s.right &&
                         (s.shape == SetShape::LowerTrapezoid || s.left < s.core) &&
                         (s.shape == SetShape::UpperTrapezoid || s.core < s.right);
    if (!ordered) throw std::invalid_argument("fuzzy set breakpoints must be increasing");
  }
}

void FuzzyPartition::memberships(double x, std::span<double> out) const noexcept {
  const double clamped = domain_.clamp(x);
  for (std::size_t j = 0; j < sets_.size(); ++j) out[j] = membership(sets_[j], clamped);
}

std::vector<double> FuzzyPartition::memberships(double x) const {
  std::vector<double> out(sets_.size());
  memberships(x, out);
  return out;
}

double FuzzyPartition::prototype(std::size_t j) const {
  const auto& s = sets_.at(j);
  switch (s.shape) {
    case SetShape::LowerTrapezoid: return 0.5 * (domain_.lo + s.core);
    case SetShape::UpperTrapezoid: return 0.5 * (s.core + domain_.hi);
    case SetShape::Triangle: break;
  }
  return s.core;
}

double firingStrength(const CnfRule& rule, std::span<const std::vector<double>> memberships) {
  double strength = 1.0;
  for (std::size_t i = 0; i < rule.masks.size(); ++i) {
    double clause = 0.0;
    const auto& mu = memberships[i];
    for (std::size_t j = 0; j < mu.size(); ++j) {
      if (rule.masks[i] >> j & 1u) clause = std::max(clause, mu[j]);
    }
    strength = std::min(strength, clause);
  }
  return strength;
}

std::int64_t decisionPoints(const CnfRule& rule) {
  std::int64_t product = 1;
  for (auto mask : rule.masks) product *= std::popcount(mask);
  return product;
}

std::int64_t phenotypicComplexity(const RuleBase& rb) {
  std::int64_t total = 0;
  for (const auto& rule : rb.rules) total += decisionPoints(rule);
  return total;
}

Frbs::Frbs(DataBase db, RuleBase rb) : db_(std::move(db)), rb_(std::move(rb)) {
  if (db_.tag != rb_.tag) {
    throw std::invalid_argument("cannot pair DB " + db_.tag.label() + " with RB " + rb_.tag.label());
  }
  if (db_.partitions.size() != db_.tag.dims()) throw std::invalid_argument("DB partitions do not match its tag");
  offsets_.reserve(db_.partitions.size());
  for (std::size_t i = 0; i < db_.partitions.size(); ++i) {
    if (db_.partitions[i].size() != static_cast<std::size_t>(db_.tag[i])) {
      throw std::invalid_argument("DB partition size does not match its tag");
    }
    offsets_.push_back(totalSets_);
    totalSets_ += db_.partitions[i].size();
  }
  for (const auto& rule : rb_.rules) {
    if (rule.masks.size() != db_.tag.dims()) throw std::invalid_argument("rule arity does not match tag");
    for (std::size_t i = 0; i < rule.masks.size(); ++i) {
      const std::uint32_t full = (std::uint64_t{1} << db_.tag[i]) - 1;
      if (rule.masks[i] == 0 || (rule.masks[i] & ~full) != 0) {
        throw std::invalid_argument("rule clause mask is empty or out of range");
      }
    }
    if (rule.action < 1 || rule.action > rb_.numActions) throw std::invalid_argument("rule action out of range");
  }
}

void Frbs::fillMemberships(std::span<const double> x, std::span<double> out) const {
  for (std::size_t i = 0; i < db_.partitions.size(); ++i) {
    db_.partitions[i].memberships(x[i], out.subspan(offsets_[i], db_.partitions[i].size()));
  }
}

// Writes normalised votes; false when the total firing strength is zero.
bool Frbs::accumulateVotes(std::span<const double> x, std::span<double> votes) const {
  if (x.size() != dims()) throw std::invalid_argument("input dimension does not match FRBS");
  Scratch scratch(totalSets_);
  const auto mu = scratch.view();
  fillMemberships(x, mu);

  std::fill(votes.begin(), votes.end(), 0.0);
  double total = 0.0;
  for (const auto& rule : rb_.rules) {
    double strength = 1.0;
    for (std::size_t i = 0; i < rule.masks.size() && strength > 0.0; ++i) {
      double clause = 0.0;
      const auto* degrees = mu.data() + offsets_[i];
      for (std::uint32_t mask = rule.masks[i]; mask != 0; mask &= mask - 1) {
        clause = std::max(clause, degrees[std::countr_zero(mask)]);
      }
      strength = std::min(strength, clause);
    }
    votes[static_cast<std::size_t>(rule.action - 1)] += strength;
    total += strength;
  }
  if (total == 0.0) return false;
  for (auto& v : votes) v /= total;
  return true;
}

std::optional<std::vector<double>> Frbs::votingStrengths(std::span<const double> x) const {
  std::vector<double> votes(static_cast<std::size_t>(rb_.numActions));
  if (!accumulateVotes(x, votes)) return std::nullopt;
  return votes;
}

std::optional<Action> Frbs::selectAction(std::span<const double> x) const {
  Scratch scratch(static_cast<std::size_t>(rb_.numActions));
  const auto votes = scratch.view();
  if (!accumulateVotes(x, votes)) return std::nullopt;
  std::size_t best = 0;
  for (std::size_t a = 1; a < votes.size(); ++a) {
    if (votes[a] > votes[best]) best = a;
  }
  return static_cast<Action>(best + 1);
}

}  // namespace mococo
