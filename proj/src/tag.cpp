#include "mococo/tag.hpp"

#include <algorithm>
#include <charconv>
#include <stdexcept>

namespace mococo {

SubspeciesTag::SubspeciesTag(std::vector<int> granularities) : granularities_(std::move(granularities)) {
  if (granularities_.empty()) {
    throw std::invalid_argument("subspecies tag needs at least one feature");
  }
  for (int m : granularities_) {
    if (m < kMinSets || m > kMaxSets) {
      throw std::invalid_argument("subspecies tag component " + std::to_string(m) + " outside [" +
                                  std::to_string(kMinSets) + ", " + std::to_string(kMaxSets) + "]");
    }
  }
}

std::string SubspeciesTag::label() const {
  std::string out;
  for (std::size_t i = 0; i < granularities_.size(); ++i) {
    if (i > 0) out += 'x';
    out += std::to_string(granularities_[i]);
  }
  return out;
}

SubspeciesTag SubspeciesTag::parse(std::string_view label) {
  std::vector<int> parts;
  while (true) {
    const auto sep = label.find('x');
    const auto token = label.substr(0, sep);
    int value = 0;
    const auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), value);
    if (ec != std::errc{} || ptr != token.data() + token.size() || token.empty()) {
      throw std::invalid_argument("malformed subspecies tag '" + std::string(label) + "'");
    }
    parts.push_back(value);
    if (sep == std::string_view::npos) break;
    label.remove_prefix(sep + 1);
  }
  return SubspeciesTag(std::move(parts));
}

std::size_t indexOf(const std::vector<SubspeciesTag>& tags, const SubspeciesTag& tag) {
  return static_cast<std::size_t>(std::find(tags.begin(), tags.end(), tag) - tags.begin());
}

}  // namespace mococo
