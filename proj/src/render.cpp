#include "mococo/render.hpp"

#include <bit>
#include <stdexcept>

namespace mococo {

std::string renderRule(const CnfRule& rule, const RuleLabels& labels) {
  if (labels.features.size() != rule.masks.size() || labels.values.size() != rule.masks.size()) {
    throw std::invalid_argument("rule labels do not match the rule's feature count");
  }
  std::string out = "IF ";
  for (std::size_t i = 0; i < rule.masks.size(); ++i) {
    const auto& names = labels.values[i];
    const std::uint32_t mask = rule.masks[i];
    if (names.empty() || names.size() > 32 || (mask >> names.size()) != 0 || mask == 0) {
      throw std::invalid_argument("linguistic values for " + labels.features[i] + " do not match the partition");
    }
    if (i > 0) out += " and ";
    out += labels.features[i] + " is ";
    const auto selected = std::popcount(mask);
    if (static_cast<std::size_t>(selected) == names.size()) {
      out += "#";
      continue;
    }
    if (selected > 1) out += "{";
    bool first = true;
    for (std::size_t j = 0; j < names.size(); ++j) {
      if (!(mask >> j & 1u)) continue;
      if (!first) out += " or ";
      out += names[j];
      first = false;
    }
    if (selected > 1) out += "}";
  }
  out += " THEN a is " + std::to_string(rule.action);
  if (!labels.actions.empty()) {
    if (rule.action < 1 || static_cast<std::size_t>(rule.action) > labels.actions.size()) {
      throw std::invalid_argument("no name for action " + std::to_string(rule.action));
    }
    out += " (" + labels.actions[static_cast<std::size_t>(rule.action - 1)] + ")";
  }
  return out;
}

std::vector<std::string> renderRules(const RuleBase& rb, const RuleLabels& labels) {
  if (labels.values.size() != rb.tag.dims()) throw std::invalid_argument("rule labels do not match the tag");
  for (std::size_t i = 0; i < rb.tag.dims(); ++i) {
    if (labels.values[i].size() != static_cast<std::size_t>(rb.tag[i])) {
      throw std::invalid_argument("feature " + std::to_string(i + 1) + " has " +
                                  std::to_string(labels.values[i].size()) + " names but the tag " + rb.tag.label() +
                                  " needs " + std::to_string(rb.tag[i]));
    }
  }
  std::vector<std::string> lines;
  lines.reserve(rb.rules.size());
  for (const auto& rule : rb.rules) lines.push_back(renderRule(rule, labels));
  return lines;
}

RuleLabels Vocabulary::labelsFor(const SubspeciesTag& tag) const {
  RuleLabels labels;
  labels.actions = actions;
  for (std::size_t i = 0; i < tag.dims(); ++i) {
    labels.features.push_back(i < features.size() ? features[i] : "x" + std::to_string(i + 1));
    const int m = tag[i];
    const std::vector<std::string>* named = nullptr;
    if (i < values.size()) {
      if (const auto it = values[i].find(m); it != values[i].end()) named = &it->second;
    }
    if (named != nullptr) {
      labels.values.push_back(*named);
    } else {
      std::vector<std::string> generic;
      for (int j = 1; j <= m; ++j) generic.push_back("S" + std::to_string(j));
      labels.values.push_back(std::move(generic));
    }
  }
  return labels;
}

Vocabulary mountainCarVocabulary() {
  Vocabulary v;
  v.features = {"x", "ẋ"};
  v.values = {
      {{2, {"L", "R"}}, {3, {"L", "M", "R"}}, {4, {"FL", "L", "R", "FR"}}, {5, {"FL", "L", "M", "R", "FR"}}},
      {{2, {"L", "H"}}, {3, {"L", "M", "H"}}, {4, {"VL", "L", "H", "VH"}}, {5, {"VL", "L", "M", "H", "VH"}}},
  };
  v.actions = {"Left", "Right"};
  return v;
}

}  // namespace mococo
