#include "codemix/textprep/tokenizer.hpp"

#include <algorithm>

#include "codemix/error.hpp"
#include "codemix/textprep/utf8.hpp"

namespace codemix::textprep {
namespace {

// Greedy longest-prefix match; returns false if some position has no match.
bool match_pieces(std::string_view word, const Vocab& vocab,
                  std::vector<TokenId>& out) {
  const auto offsets = codepoint_offsets(word);
  const std::size_t n = offsets.size() - 1;
  std::string key;
  std::size_t start = 0;
  while (start < n) {
    std::size_t end = n;
    bool found = false;
    while (end > start) {
      const auto piece = word.substr(offsets[start], offsets[end] - offsets[start]);
      key.clear();
      if (start > 0) key += Vocab::kContinuationPrefix;
      key += piece;
      if (const auto id = vocab.find(key)) {
        out.push_back(*id);
        found = true;
        break;
      }
      --end;
    }
    if (!found) return false;
    start = end;
  }
  return true;
}

}  // namespace

std::size_t TokenBatch::length(std::size_t row) const {
  std::size_t n = 0;
  while (n < seq_len && live(row, n)) ++n;
  return n;
}

std::vector<TokenId> tokenize(std::string_view text, const Vocab& vocab,
                              std::size_t max_seq_len) {
  if (max_seq_len < 2) fail(ErrorKind::kConfig, "tokenize: max_seq_len must be >= 2");
  std::vector<TokenId> ids{Vocab::kCls};
  std::vector<TokenId> pieces;
  for (const auto word : split_words(text)) {
    if (ids.size() >= max_seq_len) break;
    pieces.clear();
    if (match_pieces(word, vocab, pieces)) {
      ids.insert(ids.end(), pieces.begin(), pieces.end());
    } else {
      ids.push_back(Vocab::kUnk);
    }
  }
  if (ids.size() > max_seq_len) ids.resize(max_seq_len);
  return ids;
}

std::vector<std::string> wordpiece(std::string_view word, const Vocab& vocab) {
  std::vector<TokenId> ids;
  if (!match_pieces(word, vocab, ids)) return {vocab.token(Vocab::kUnk)};
  std::vector<std::string> out;
  out.reserve(ids.size());
  for (const auto id : ids) out.push_back(vocab.token(id));
  return out;
}

TokenBatch encode_batch(std::span<const std::string> texts, const Vocab& vocab,
                        std::size_t max_seq_len) {
  if (texts.empty()) fail(ErrorKind::kData, "encode_batch: no texts");
  std::vector<std::vector<TokenId>> rows;
  rows.reserve(texts.size());
  std::size_t longest = 0;
  for (const auto& text : texts) {
    rows.push_back(tokenize(text, vocab, max_seq_len));
    longest = std::max(longest, rows.back().size());
  }
  TokenBatch batch;
  batch.batch = rows.size();
  batch.seq_len = longest;
  batch.ids.assign(batch.batch * longest, Vocab::kPad);
  batch.mask.assign(batch.batch * longest, 0);
  for (std::size_t r = 0; r < rows.size(); ++r) {
    for (std::size_t c = 0; c < rows[r].size(); ++c) {
      batch.ids[r * longest + c] = rows[r][c];
      batch.mask[r * longest + c] = 1;
    }
  }
  return batch;
}

}  // namespace codemix::textprep
