#pragma once

#include <string>
#include <string_view>
#include <unordered_set>

#include <nlohmann/json_fwd.hpp>

namespace codemix::textprep {

struct CleanRules {
  bool remove_urls = true;
  bool remove_mentions = true;
  bool remove_emoji = true;
  bool remove_punct = true;
  bool remove_stopwords = true;
  bool lowercase_latin = true;
  std::unordered_set<std::string> stopword_list;

  // All rules on, embedded English stopword list.
  static CleanRules defaults();

  // Throws a config error when remove_stopwords is set with an empty list.
  void validate() const;

  friend bool operator==(const CleanRules&, const CleanRules&) = default;
};

// The stopword list is serialized sorted so the output is deterministic.
void to_json(nlohmann::json& j, const CleanRules& rules);
void from_json(const nlohmann::json& j, CleanRules& rules);

// Emoji / pictograph / regional-indicator blocks removed by clean_text.
bool is_emoji(char32_t cp) noexcept;
// Unicode general category P* (Pc, Pd, Ps, Pe, Pi, Pf, Po).
bool is_punctuation(char32_t cp) noexcept;

// Applies, in order: URL removal, @mention removal, emoji removal,
// punctuation removal, Latin lowercasing, stopword removal, whitespace
// collapsing. Each stage can be disabled in `rules`. The result is a fixed
// point: clean_text(clean_text(x)) == clean_text(x).
std::string clean_text(std::string_view raw, const CleanRules& rules);

}  // namespace codemix::textprep
