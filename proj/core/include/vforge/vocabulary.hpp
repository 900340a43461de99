#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace vforge {

enum class LabelMode { kForeground, kBackground };

// Word lists used to filter tagger output. All entries are lowercase and
// deduplicated; defaults() carries the stock lists.
struct VocabularyConfig {
  std::vector<std::string> adjectives;
  std::vector<std::string> verbs;
  std::vector<std::string> colors;
  std::vector<std::string> repeated_character_descriptions;
  std::vector<std::string> background_allowlist;

  static VocabularyConfig defaults();

  // Loads a JSON object with any of the five list keys; missing keys keep defaults.
  static VocabularyConfig from_json_file(const std::string& path);

  // Lowercases and deduplicates every list in place.
  void normalize();

  bool is_stopword(std::string_view lowercase_label) const;
  bool is_background(std::string_view lowercase_label) const;
};

std::string to_lower(std::string_view s);

// Foreground drops labels found in any stoplist; background keeps only
// allowlisted labels. Labels are compared and returned in trimmed lowercase,
// first occurrence wins, order preserved.
std::vector<std::string> filter_labels(const std::vector<std::string>& labels, LabelMode mode,
                                       const VocabularyConfig& vocab);

}  // namespace vforge
