#include "fixtures.hpp"

#include <array>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "codemix/textprep/utf8.hpp"

namespace codemix::testing {
namespace {

constexpr std::array<const char*, 24> kFiller = {
    "padam", "super", "vera", "level", "semma", "mass", "thalaivar", "song",
    "bgm",   "trailer", "verithanam", "anna", "fans", "waiting", "release", "day",
    "first", "show",  "nalla", "iruku", "marana", "kolai", "hit", "climax"};

const char* pick(SplitMix64& rng, std::span<const char* const> items) {
  return items[rng.below(items.size())];
}

}  // namespace

dataset::LabeledCorpus separable_corpus(std::size_t n, std::uint64_t seed) {
  SplitMix64 rng(seed);
  dataset::LabeledCorpus corpus({"NOT", "HOF"});
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t label = i % 2;
    const std::size_t words = 3 + rng.below(5);
    std::vector<std::string> tokens;
    for (std::size_t w = 0; w < words; ++w) tokens.emplace_back(pick(rng, kFiller));
    if (label == 1) tokens.insert(tokens.begin() + rng.below(tokens.size() + 1), "bad1");
    std::string text;
    for (const auto& t : tokens) {
      if (!text.empty()) text += ' ';
      text += t;
    }
    corpus.add({std::to_string(i + 1), text, label});
  }
  return corpus;
}

model::ModelConfig desk_model_config(model::PoolerKind pooler) {
  model::ModelConfig cfg;
  cfg.d_model = 64;
  cfg.n_layers = 2;
  cfg.n_heads = 4;
  cfg.d_ff = 128;
  cfg.max_seq_len = 128;
  cfg.pooler_kind = pooler;
  return cfg;
}

training::TrainConfig sanity_train_config() {
  training::TrainConfig cfg;
  // Training from random init needs a larger step than fine-tuning a
  // pretrained encoder; every other value is the default recipe.
  cfg.lr = 1e-3;
  cfg.epochs = 30;
  cfg.seed = 1234;
  return cfg;
}

std::string adversarial_string(SplitMix64& rng) {
  static const std::vector<std::string> kUrls = {
      "http://x.co/a?b=1", "HTTPS://T.CO/XYZ", "ftp://files.example/a.txt",
      "www.example.com/x", "(https://a.b/c)", "xhttp://foo.bar", "https://😀.com",
      "http://", "WWW.SITE.IN", "svn+ssh://host/repo", "\"http://q.org\"",
      "https://t.co/xyz!!!", "<http://ok.net/?q=a,b>"};
  static const std::vector<std::string> kMentions = {"@user", "@@x", "@", "a@b.c",
                                                     "@😀", "@Vijay_fan", "(@x)"};
  static const std::vector<std::string> kWords = {"The", "IS", "don't", "Vera", "level",
                                                  "MOVIE", "thalaivaa", "a", "ÉCOLE", "Ångström"};
  static const std::vector<std::string> kPunct = {"!", "?", ".", ",", "...", "—", "–", "«", "»",
                                                  "¿", "¡", "“", "”", "‘", "’", "、", "。", "#",
                                                  "%", "&", "*", "_", "(", ")", "[", "]", "{", "}",
                                                  "/", ":", ";", "'", "\"", "-", "@"};
  static const std::vector<std::string> kSymbols = {"$", "+", "<", "=", ">", "^", "`", "|",
                                                    "~", "©", "™", "→", "€"};
  static const std::vector<std::string> kSpaces = {" ", "  ", "\t", "\n", " ", "　",
                                                   " ", " \r\n "};
  static const std::vector<std::pair<char32_t, char32_t>> kEmoji = {
      {0x1F300, 0x1F5FF}, {0x1F600, 0x1F64F}, {0x1F680, 0x1F6FF}, {0x1F900, 0x1F9FF},
      {0x1FA70, 0x1FAFF}, {0x2600, 0x27BF},   {0xFE0F, 0xFE0F},   {0x1F1E6, 0x1F1FF}};

  auto any = [&](const std::vector<std::string>& v) { return v[rng.below(v.size())]; };
  std::string out;
  const std::size_t pieces = 1 + rng.below(14);
  for (std::size_t p = 0; p < pieces; ++p) {
    switch (rng.below(9)) {
      case 0: {  // random Latin word
        const std::size_t len = 1 + rng.below(6);
        for (std::size_t i = 0; i < len; ++i) {
          const char base = rng.below(2) ? 'a' : 'A';
          out.push_back(static_cast<char>(base + rng.below(26)));
        }
        break;
      }
      case 1: {  // Tamil letters and vowel signs
        const std::size_t len = 1 + rng.below(5);
        for (std::size_t i = 0; i < len; ++i) {
          const char32_t cp = rng.below(3) ? 0x0B85 + rng.below(0x35) : 0x0BBE + rng.below(0x10);
          textprep::append_utf8(out, cp);
        }
        break;
      }
      case 2: {
        const auto& [lo, hi] = kEmoji[rng.below(kEmoji.size())];
        textprep::append_utf8(out, lo + static_cast<char32_t>(rng.below(hi - lo + 1)));
        if (rng.below(4) == 0) textprep::append_utf8(out, 0x200D);  // ZWJ
        break;
      }
      case 3: out += any(kUrls); break;
      case 4: out += any(kMentions); break;
      case 5: out += any(kPunct); break;
      case 6: out += any(kSymbols); break;
      case 7: out += any(kWords); break;
      default: out += std::to_string(rng.below(1000)); break;
    }
    if (rng.below(3) != 0) out += any(kSpaces);
  }
  return out;
}

nn::Tensor random_tensor(const nn::Tensor::Shape& shape, SplitMix64& rng, double scale) {
  nn::Tensor t(shape);
  for (auto& x : t.data()) x = scale * (2.0 * rng.uniform() - 1.0);
  return t;
}

std::vector<std::uint8_t> random_prefix_mask(std::size_t batch, std::size_t len,
                                             SplitMix64& rng) {
  std::vector<std::uint8_t> mask(batch * len, 0);
  for (std::size_t b = 0; b < batch; ++b) {
    const std::size_t live = 1 + rng.below(len);
    for (std::size_t i = 0; i < live; ++i) mask[b * len + i] = 1;
  }
  return mask;
}

textprep::TokenBatch random_batch(std::size_t batch, std::size_t len, std::size_t vocab,
                                  SplitMix64& rng) {
  textprep::TokenBatch tb;
  tb.batch = batch;
  tb.seq_len = len;
  tb.mask = random_prefix_mask(batch, len, rng);
  tb.ids.assign(batch * len, textprep::Vocab::kPad);
  for (std::size_t b = 0; b < batch; ++b) {
    tb.ids[b * len] = textprep::Vocab::kCls;
    for (std::size_t i = 1; i < len; ++i) {
      if (tb.mask[b * len + i]) {
        tb.ids[b * len + i] = static_cast<textprep::TokenId>(4 + rng.below(vocab - 4));
      }
    }
  }
  return tb;
}

std::string temp_path(const std::string& name) {
  const auto dir = std::filesystem::temp_directory_path() / "codemix_tests";
  std::filesystem::create_directories(dir);
  return (dir / name).string();
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  out << content;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

}  // namespace codemix::testing
