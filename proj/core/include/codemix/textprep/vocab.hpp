#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace codemix::textprep {

using TokenId = std::int32_t;

// Subword vocabulary. Ids 0..3 are the specials; corpus tokens start at 4.
// Word-initial pieces are stored bare, continuation pieces carry a "##"
// prefix.
class Vocab {
 public:
  static constexpr TokenId kPad = 0;
  static constexpr TokenId kUnk = 1;
  static constexpr TokenId kCls = 2;
  static constexpr TokenId kSep = 3;
  static constexpr std::size_t kNumSpecials = 4;
  static constexpr std::string_view kContinuationPrefix = "##";

  // Specials only.
  Vocab();

  std::size_t size() const noexcept { return id_to_token_.size(); }
  std::optional<TokenId> find(std::string_view token) const;
  TokenId id_or_unk(std::string_view token) const;
  const std::string& token(TokenId id) const;
  bool contains(std::string_view token) const { return find(token).has_value(); }

  // One token per line, line number = id.
  std::string to_text() const;
  static Vocab from_text(std::string_view text);
  void save(const std::filesystem::path& path) const;
  static Vocab load(const std::filesystem::path& path);

  friend bool operator==(const Vocab& a, const Vocab& b) {
    return a.id_to_token_ == b.id_to_token_;
  }

 private:
  struct StringHash {
    using is_transparent = void;
    std::size_t operator()(std::string_view s) const noexcept {
      return std::hash<std::string_view>{}(s);
    }
  };

  void append(std::string token);

  std::vector<std::string> id_to_token_;
  std::unordered_map<std::string, TokenId, StringHash, std::equal_to<>>
      token_to_id_;

  friend Vocab build_vocab(std::span<const std::string>, std::size_t,
                           std::size_t);
};

// Whole words with frequency >= min_freq, plus every character seen in both
// its word-initial ("c") and continuation ("##c") form; characters are exempt
// from min_freq and count every occurrence. Entries are ranked by frequency
// (descending) then byte-lexicographic order and truncated so that
// size() <= max_size including the specials.
Vocab build_vocab(std::span<const std::string> corpus, std::size_t max_size,
                  std::size_t min_freq);

}  // namespace codemix::textprep
