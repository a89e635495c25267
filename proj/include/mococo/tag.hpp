#pragma once

#include <compare>
#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace mococo {

/// Number of fuzzy sets on each feature. Fixes genotype lengths for both
/// species and restricts cooperation to individuals with equal tags.
class SubspeciesTag {
public:
  static constexpr int kMinSets = 2;
  static constexpr int kMaxSets = 32;

  SubspeciesTag() = default;
  explicit SubspeciesTag(std::vector<int> granularities);

  std::size_t dims() const noexcept { return granularities_.size(); }
  int operator[](std::size_t feature) const { return granularities_.at(feature); }
  const std::vector<int>& granularities() const noexcept { return granularities_; }

  /// "4x4" style label used in CSVs and file names.
  std::string label() const;
  static SubspeciesTag parse(std::string_view label);

  friend auto operator<=>(const SubspeciesTag&, const SubspeciesTag&) = default;
  friend bool operator==(const SubspeciesTag&, const SubspeciesTag&) = default;

private:
  std::vector<int> granularities_;
};

/// Index of `tag` within `tags`, or tags.size() when absent.
std::size_t indexOf(const std::vector<SubspeciesTag>& tags, const SubspeciesTag& tag);

}  // namespace mococo
