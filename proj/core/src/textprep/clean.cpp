#include "codemix/textprep/clean.hpp"

#include <unicode/uchar.h>
#include <unicode/uscript.h>

#include <algorithm>
#include <nlohmann/json.hpp>
#include <vector>

#include "codemix/error.hpp"
#include "codemix/textprep/stopwords.hpp"
#include "codemix/textprep/utf8.hpp"

namespace codemix::textprep {
namespace {

struct Range {
  char32_t lo;
  char32_t hi;
};

constexpr Range kEmojiRanges[] = {
    {0x1F300, 0x1F5FF}, {0x1F600, 0x1F64F}, {0x1F680, 0x1F6FF},
    {0x1F900, 0x1F9FF}, {0x1FA70, 0x1FAFF}, {0x2600, 0x27BF},
    {0xFE0F, 0xFE0F},   {0x1F1E6, 0x1F1FF},
};

bool is_ascii_alpha(char32_t c) {
  return (c >= U'a' && c <= U'z') || (c >= U'A' && c <= U'Z');
}

bool is_scheme_char(char32_t c) {
  return is_ascii_alpha(c) || (c >= U'0' && c <= U'9') || c == U'+' ||
         c == U'-' || c == U'.';
}

char32_t ascii_lower(char32_t c) {
  return (c >= U'A' && c <= U'Z') ? c + (U'a' - U'A') : c;
}

std::size_t run_end(const std::u32string& s, std::size_t from) {
  while (from < s.size() && !is_space(s[from])) ++from;
  return from;
}

std::u32string erase_marked(const std::u32string& s,
                            const std::vector<bool>& drop) {
  std::u32string out;
  out.reserve(s.size());
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (!drop[i]) out.push_back(s[i]);
  }
  return out;
}

// `scheme://...` and `www....` up to the next whitespace.
std::u32string strip_urls(const std::u32string& s) {
  std::vector<bool> drop(s.size(), false);
  auto mark = [&](std::size_t from, std::size_t to) {
    for (std::size_t i = from; i < to; ++i) drop[i] = true;
  };
  for (std::size_t k = 0; k + 3 <= s.size(); ++k) {
    if (s[k] != U':' || s[k + 1] != U'/' || s[k + 2] != U'/') continue;
    std::size_t start = k;
    while (start > 0 && is_scheme_char(s[start - 1])) --start;
    while (start < k && !is_ascii_alpha(s[start])) ++start;
    if (start < k) mark(start, run_end(s, k));
  }
  for (std::size_t i = 0; i + 4 <= s.size(); ++i) {
    if (ascii_lower(s[i]) != U'w' || ascii_lower(s[i + 1]) != U'w' ||
        ascii_lower(s[i + 2]) != U'w' || s[i + 3] != U'.') {
      continue;
    }
    if (i > 0 && u_isalnum(static_cast<UChar32>(s[i - 1]))) continue;
    mark(i, run_end(s, i));
  }
  return erase_marked(s, drop);
}

std::u32string strip_mentions(const std::u32string& s) {
  std::vector<bool> drop(s.size(), false);
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (s[i] != U'@') continue;
    const std::size_t end = run_end(s, i);
    for (std::size_t j = i; j < end; ++j) drop[j] = true;
    i = end;
  }
  return erase_marked(s, drop);
}

template <typename Pred>
std::u32string strip_if(const std::u32string& s, Pred pred) {
  std::u32string out;
  out.reserve(s.size());
  for (const char32_t c : s) {
    if (!pred(c)) out.push_back(c);
  }
  return out;
}

char32_t lower_latin(char32_t c) {
  if (c < 0x80) return ascii_lower(c);
  UErrorCode status = U_ZERO_ERROR;
  const auto cp = static_cast<UChar32>(c);
  if (uscript_getScript(cp, &status) != USCRIPT_LATIN || U_FAILURE(status)) {
    return c;
  }
  return static_cast<char32_t>(u_tolower(cp));
}

}  // namespace

CleanRules CleanRules::defaults() {
  CleanRules rules;
  rules.stopword_list = default_stopword_set();
  return rules;
}

void CleanRules::validate() const {
  if (remove_stopwords && stopword_list.empty()) {
    fail(ErrorKind::kConfig,
         "clean rules: remove_stopwords is set but stopword_list is empty");
  }
}

void to_json(nlohmann::json& j, const CleanRules& rules) {
  std::vector<std::string> words(rules.stopword_list.begin(), rules.stopword_list.end());
  std::sort(words.begin(), words.end());
  j = nlohmann::json{{"remove_urls", rules.remove_urls},
                     {"remove_mentions", rules.remove_mentions},
                     {"remove_emoji", rules.remove_emoji},
                     {"remove_punct", rules.remove_punct},
                     {"remove_stopwords", rules.remove_stopwords},
                     {"lowercase_latin", rules.lowercase_latin},
                     {"stopword_list", words}};
}

void from_json(const nlohmann::json& j, CleanRules& rules) {
  rules = CleanRules::defaults();
  rules.remove_urls = j.value("remove_urls", rules.remove_urls);
  rules.remove_mentions = j.value("remove_mentions", rules.remove_mentions);
  rules.remove_emoji = j.value("remove_emoji", rules.remove_emoji);
  rules.remove_punct = j.value("remove_punct", rules.remove_punct);
  rules.remove_stopwords = j.value("remove_stopwords", rules.remove_stopwords);
  rules.lowercase_latin = j.value("lowercase_latin", rules.lowercase_latin);
  if (j.contains("stopword_list")) {
    const auto words = j.at("stopword_list").get<std::vector<std::string>>();
    rules.stopword_list = {words.begin(), words.end()};
  }
}

bool is_emoji(char32_t cp) noexcept {
  for (const auto& r : kEmojiRanges) {
    if (cp >= r.lo && cp <= r.hi) return true;
  }
  return false;
}

bool is_punctuation(char32_t cp) noexcept {
  return (U_GET_GC_MASK(static_cast<UChar32>(cp)) & U_GC_P_MASK) != 0;
}

std::string clean_text(std::string_view raw, const CleanRules& rules) {
  std::u32string s = decode_utf8(raw);
  if (rules.remove_urls) s = strip_urls(s);
  if (rules.remove_mentions) s = strip_mentions(s);
  if (rules.remove_emoji) s = strip_if(s, is_emoji);
  if (rules.remove_punct) s = strip_if(s, is_punctuation);
  if (rules.lowercase_latin) {
    for (auto& c : s) c = lower_latin(c);
  }

  std::string out;
  out.reserve(s.size());
  std::size_t i = 0;
  while (i < s.size()) {
    while (i < s.size() && is_space(s[i])) ++i;
    if (i == s.size()) break;
    const std::size_t end = run_end(s, i);
    std::string word = encode_utf8(std::u32string_view(s).substr(i, end - i));
    i = end;
    if (rules.remove_stopwords && rules.stopword_list.contains(word)) continue;
    if (!out.empty()) out.push_back(' ');
    out += word;
  }
  return out;
}

}  // namespace codemix::textprep
