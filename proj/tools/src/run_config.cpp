#include "run_config.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <sstream>
#include <unordered_set>

#include "codemix/error.hpp"
#include "codemix/textprep/vocab.hpp"

namespace codemix::cli {
namespace {

#define CODEMIX_RUN_CONFIG_FIELDS(X)                                                        \
  X(train_files) X(test_file) X(text_col) X(label_col) X(id_col) X(label_names)            \
  X(remove_urls) X(remove_mentions) X(remove_emoji) X(remove_punct) X(remove_stopwords)    \
  X(lowercase_latin) X(stopwords_file) X(vocab_max_size) X(vocab_min_freq) X(d_model)      \
  X(n_layers) X(n_heads) X(d_ff) X(model_max_seq_len) X(pooler_kind) X(encoder_dropout)    \
  X(pool_include_cls) X(init_std) X(lr) X(max_seq_len) X(batch_size) X(epochs)             \
  X(weight_decay) X(dropout) X(adam_eps) X(beta1) X(beta2) X(seed) X(balance)              \
  X(balance_mode) X(warmup_steps) X(max_grad_norm) X(output_dir) X(train_tsv) X(eval_tsv)  \
  X(vocab_file) X(checkpoint_file) X(input_file) X(output_file)

std::unordered_set<std::string> read_stopwords(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorKind::kIo, "stopwords file not found: " + path);
  std::unordered_set<std::string> words;
  for (std::string line; std::getline(in, line);) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (!line.empty()) words.insert(line);
  }
  return words;
}

}  // namespace

void to_json(nlohmann::json& j, const RunConfig& cfg) {
  j = nlohmann::json::object();
#define CODEMIX_TO_JSON(name) j[#name] = cfg.name;
  CODEMIX_RUN_CONFIG_FIELDS(CODEMIX_TO_JSON)
#undef CODEMIX_TO_JSON
}

void from_json(const nlohmann::json& j, RunConfig& cfg) {
  if (!j.is_object()) fail(ErrorKind::kConfig, "config must be a JSON object");
  const nlohmann::json defaults = cfg;
  for (const auto& [key, value] : j.items()) {
    if (!defaults.contains(key)) fail(ErrorKind::kConfig, "unknown config key '" + key + "'");
  }
  try {
#define CODEMIX_FROM_JSON(name) \
  if (j.contains(#name)) j.at(#name).get_to(cfg.name);
    CODEMIX_RUN_CONFIG_FIELDS(CODEMIX_FROM_JSON)
#undef CODEMIX_FROM_JSON
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorKind::kConfig, std::string("config: ") + e.what());
  }
}

RunConfig merge(const RunConfig& base, const nlohmann::json& overrides) {
  RunConfig out = base;
  from_json(overrides, out);
  return out;
}

std::string kebab_case(const std::string& snake) {
  std::string out = snake;
  std::replace(out.begin(), out.end(), '_', '-');
  return out;
}

nlohmann::json parse_flag_value(const nlohmann::json& current, const std::string& key,
                                const std::string& text) {
  auto bad = [&]() -> nlohmann::json {
    fail(ErrorKind::kConfig, "invalid value '" + text + "' for --" + kebab_case(key));
  };
  if (current.is_boolean()) {
    if (text == "true" || text == "1") return true;
    if (text == "false" || text == "0") return false;
    return bad();
  }
  if (current.is_number_unsigned() || current.is_number_integer()) {
    std::uint64_t v = 0;
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
    if (ec != std::errc() || ptr != text.data() + text.size()) return bad();
    return v;
  }
  if (current.is_number_float()) {
    std::size_t used = 0;
    double v = 0;
    try {
      v = std::stod(text, &used);
    } catch (const std::exception&) {
      return bad();
    }
    if (used != text.size()) return bad();
    return v;
  }
  if (current.is_array()) {
    nlohmann::json arr = nlohmann::json::array();
    std::stringstream ss(text);
    for (std::string item; std::getline(ss, item, ',');) {
      if (!item.empty()) arr.push_back(item);
    }
    return arr;
  }
  return text;
}

std::filesystem::path RunConfig::out_path(const std::string& explicit_path,
                                          const std::string& default_name) const {
  if (!explicit_path.empty()) return explicit_path;
  return std::filesystem::path(output_dir) / default_name;
}

textprep::CleanRules RunConfig::clean_rules() const {
  textprep::CleanRules rules = textprep::CleanRules::defaults();
  rules.remove_urls = remove_urls;
  rules.remove_mentions = remove_mentions;
  rules.remove_emoji = remove_emoji;
  rules.remove_punct = remove_punct;
  rules.remove_stopwords = remove_stopwords;
  rules.lowercase_latin = lowercase_latin;
  if (!stopwords_file.empty()) rules.stopword_list = read_stopwords(stopwords_file);
  rules.validate();
  return rules;
}

dataset::TsvSchema RunConfig::raw_schema() const {
  return {text_col, label_col, id_col, label_names};
}

model::ModelConfig RunConfig::model_config() const {
  model::ModelConfig m;
  m.d_model = d_model;
  m.n_layers = n_layers;
  m.n_heads = n_heads;
  m.d_ff = d_ff;
  m.max_seq_len = model_max_seq_len;
  m.pooler_kind = model::parse_pooler_kind(pooler_kind);
  m.n_classes = label_names.size();
  m.dropout_p = dropout;
  m.encoder_dropout = encoder_dropout;
  m.pool_include_cls = pool_include_cls;
  m.init_std = init_std;
  return m;
}

training::TrainConfig RunConfig::train_config() const {
  training::TrainConfig t;
  t.lr = lr;
  t.max_seq_len = max_seq_len;
  t.batch_size = batch_size;
  t.epochs = epochs;
  t.weight_decay = weight_decay;
  t.dropout = dropout;
  t.adam_eps = adam_eps;
  t.beta1 = beta1;
  t.beta2 = beta2;
  t.seed = seed;
  t.balance = balance;
  t.balance_mode = dataset::parse_balance_mode(balance_mode);
  t.warmup_steps = warmup_steps;
  t.max_grad_norm = max_grad_norm;
  return t;
}

void RunConfig::validate() const {
  if (label_names.size() < 2) fail(ErrorKind::kConfig, "label_names needs at least two labels");
  for (std::size_t i = 0; i < label_names.size(); ++i) {
    if (label_names[i].empty()) fail(ErrorKind::kConfig, "label_names entries must be non-empty");
    for (std::size_t k = 0; k < i; ++k) {
      if (label_names[k] == label_names[i]) {
        fail(ErrorKind::kConfig, "duplicate label name '" + label_names[i] + "'");
      }
    }
  }
  if (text_col.empty() || label_col.empty()) fail(ErrorKind::kConfig, "column names must be set");
  if (vocab_min_freq == 0) fail(ErrorKind::kConfig, "vocab_min_freq must be at least 1");
  model::ModelConfig m = model_config();
  m.vocab_size = std::max<std::size_t>(vocab_max_size, textprep::Vocab::kNumSpecials);
  m.validate();
  train_config().validate();
}

dataset::TsvSchema prepared_schema(const std::vector<std::string>& label_names) {
  return {"text", "label", "id", label_names};
}

}  // namespace codemix::cli
