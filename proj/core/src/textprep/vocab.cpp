#include "codemix/textprep/vocab.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <sstream>

#include "codemix/error.hpp"
#include "codemix/textprep/utf8.hpp"

namespace codemix::textprep {
namespace {

constexpr std::string_view kSpecialTokens[] = {"[PAD]", "[UNK]", "[CLS]",
                                               "[SEP]"};

}  // namespace

Vocab::Vocab() {
  for (const auto special : kSpecialTokens) append(std::string(special));
}

void Vocab::append(std::string token) {
  const auto id = static_cast<TokenId>(id_to_token_.size());
  if (!token_to_id_.emplace(token, id).second) {
    fail(ErrorKind::kData, "vocab: duplicate token '" + token + "'");
  }
  id_to_token_.push_back(std::move(token));
}

std::optional<TokenId> Vocab::find(std::string_view token) const {
  const auto it = token_to_id_.find(token);
  if (it == token_to_id_.end()) return std::nullopt;
  return it->second;
}

TokenId Vocab::id_or_unk(std::string_view token) const {
  return find(token).value_or(kUnk);
}

const std::string& Vocab::token(TokenId id) const {
  if (id < 0 || static_cast<std::size_t>(id) >= id_to_token_.size()) {
    fail(ErrorKind::kData, "vocab: id " + std::to_string(id) + " out of range");
  }
  return id_to_token_[static_cast<std::size_t>(id)];
}

std::string Vocab::to_text() const {
  std::string out;
  for (const auto& token : id_to_token_) {
    out += token;
    out.push_back('\n');
  }
  return out;
}

Vocab Vocab::from_text(std::string_view text) {
  std::vector<std::string> lines;
  std::size_t pos = 0;
  while (pos < text.size()) {
    std::size_t eol = text.find('\n', pos);
    if (eol == std::string_view::npos) eol = text.size();
    std::string_view line = text.substr(pos, eol - pos);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    lines.emplace_back(line);
    pos = eol + 1;
  }
  if (lines.size() < kNumSpecials) {
    fail(ErrorKind::kData, "vocab: fewer than 4 lines; specials missing");
  }
  for (std::size_t i = 0; i < kNumSpecials; ++i) {
    if (lines[i] != kSpecialTokens[i]) {
      fail(ErrorKind::kData, "vocab: line " + std::to_string(i + 1) +
                                 " must be " + std::string(kSpecialTokens[i]));
    }
  }
  Vocab vocab;
  for (std::size_t i = kNumSpecials; i < lines.size(); ++i) {
    if (lines[i].empty()) {
      fail(ErrorKind::kData, "vocab: empty token at line " + std::to_string(i + 1));
    }
    vocab.append(std::move(lines[i]));
  }
  return vocab;
}

void Vocab::save(const std::filesystem::path& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(ErrorKind::kIo, "vocab: cannot write " + path.string());
  out << to_text();
  if (!out) fail(ErrorKind::kIo, "vocab: write failed for " + path.string());
}

Vocab Vocab::load(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorKind::kIo, "vocab not found: " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return from_text(buf.str());
}

Vocab build_vocab(std::span<const std::string> corpus, std::size_t max_size,
                  std::size_t min_freq) {
  if (max_size < Vocab::kNumSpecials) {
    fail(ErrorKind::kConfig, "vocab: max_size must be at least 4");
  }
  std::map<std::string, std::size_t> words;
  std::map<std::string, std::size_t> chars;
  for (const auto& line : corpus) {
    for (const auto word : split_words(line)) {
      ++words[std::string(word)];
      for (const char32_t cp : decode_utf8(word)) {
        std::string c;
        append_utf8(c, cp);
        ++chars[c];
      }
    }
  }

  std::map<std::string, std::size_t> entries;
  for (const auto& [word, count] : words) {
    if (count >= min_freq) entries[word] = count;
  }
  for (const auto& [c, count] : chars) {
    auto& initial = entries[c];
    initial = std::max(initial, count);
    entries[std::string(Vocab::kContinuationPrefix) + c] = count;
  }

  std::vector<std::pair<std::string, std::size_t>> ranked(entries.begin(),
                                                          entries.end());
  std::stable_sort(ranked.begin(), ranked.end(),
                   [](const auto& a, const auto& b) { return a.second > b.second; });

  Vocab vocab;
  for (auto& [token, count] : ranked) {
    if (vocab.size() >= max_size) break;
    if (vocab.contains(token)) continue;  // e.g. a corpus word "[CLS]"
    vocab.append(std::move(token));
  }
  return vocab;
}

}  // namespace codemix::textprep
