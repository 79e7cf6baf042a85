#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "codemix/textprep/vocab.hpp"

namespace codemix::textprep {

// Padded, masked id matrix, row-major [batch x seq_len].
// Invariants: every row starts with CLS (mask 1); each mask row is a prefix
// of ones followed by zeros; mask 0 implies PAD.
struct TokenBatch {
  std::size_t batch = 0;
  std::size_t seq_len = 0;
  std::vector<TokenId> ids;
  std::vector<std::uint8_t> mask;

  TokenId id(std::size_t row, std::size_t col) const { return ids[row * seq_len + col]; }
  bool live(std::size_t row, std::size_t col) const { return mask[row * seq_len + col] != 0; }
  std::size_t length(std::size_t row) const;
};

// CLS followed by greedy longest-match pieces for each whitespace word. A
// word containing any piece that cannot be matched becomes a single UNK.
// The result is truncated to max_seq_len ids.
std::vector<TokenId> tokenize(std::string_view text, const Vocab& vocab,
                              std::size_t max_seq_len);

std::vector<std::string> wordpiece(std::string_view word, const Vocab& vocab);

// Rows are padded to the longest row (capped at max_seq_len).
TokenBatch encode_batch(std::span<const std::string> texts, const Vocab& vocab,
                        std::size_t max_seq_len);

}  // namespace codemix::textprep
