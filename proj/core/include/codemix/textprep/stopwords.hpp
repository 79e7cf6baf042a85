#pragma once

#include <span>
#include <string>
#include <string_view>
#include <unordered_set>

namespace codemix::textprep {

// The embedded English stopword list, verbatim (179 entries, the list
// distributed with NLTK's English stopword corpus). Entries may contain
// apostrophes.
std::span<const std::string_view> english_stopwords() noexcept;

// The set actually matched by clean_text: each list entry with punctuation
// removed, since matching happens after punctuation is stripped ("don't"
// matches the cleaned token "dont").
std::unordered_set<std::string> default_stopword_set();

}  // namespace codemix::textprep
