#pragma once

#include "mococo/fuzzy.hpp"

#include <map>
#include <string>
#include <vector>

namespace mococo {

/// Display names for one rule base: feature names, the linguistic value of
/// every fuzzy set per feature, and optionally one name per action.
struct RuleLabels {
  std::vector<std::string> features;
  std::vector<std::vector<std::string>> values;
  std::vector<std::string> actions;
};

/// "IF x is {FL or L} and ẋ is # THEN a is 2 (Right)". A clause selecting
/// every set renders as "#", a single set without braces.
std::string renderRule(const CnfRule& rule, const RuleLabels& labels);

/// One line per rule. Throws std::invalid_argument when the labels do not
/// fit the rule base's tag.
std::vector<std::string> renderRules(const RuleBase& rb, const RuleLabels& labels);

/// Linguistic names for every partition granularity a run may use.
struct Vocabulary {
  std::vector<std::string> features;
  std::vector<std::map<int, std::vector<std::string>>> values;  // per feature, keyed by set count
  std::vector<std::string> actions;

  /// Labels for one tag; granularities without configured names fall back
  /// to "S1".."Sm".
  RuleLabels labelsFor(const SubspeciesTag& tag) const;
};

/// x: FL, L, R, FR style names; ẋ: VL, L, H, VH style names.
Vocabulary mountainCarVocabulary();

}  // namespace mococo
