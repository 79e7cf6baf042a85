#include "codemix/model/config.hpp"

#include <nlohmann/json.hpp>

#include "codemix/error.hpp"

namespace codemix::model {

PoolerKind parse_pooler_kind(const std::string& name) {
  if (name == "attention") return PoolerKind::kAttention;
  if (name == "mean") return PoolerKind::kMean;
  fail(ErrorKind::kConfig, "unknown pooler kind '" + name + "' (attention|mean)");
}

std::string to_string(PoolerKind kind) {
  return kind == PoolerKind::kAttention ? "attention" : "mean";
}

void ModelConfig::validate() const {
  auto bad = [](const std::string& msg) { fail(ErrorKind::kConfig, "model config: " + msg); };
  if (vocab_size < 4) bad("vocab_size must cover the 4 special tokens");
  if (d_model == 0 || n_layers == 0 || d_ff == 0) bad("dimensions must be positive");
  if (n_heads == 0 || d_model % n_heads != 0) bad("d_model must be divisible by n_heads");
  if (max_seq_len < 2 || max_seq_len > kMaxSeqLenCeiling) bad("max_seq_len must lie in [2, 512]");
  if (n_classes < 2) bad("n_classes must be >= 2");
  if (!(dropout_p >= 0.0 && dropout_p < 1.0)) bad("dropout_p must lie in [0, 1)");
  if (!(encoder_dropout >= 0.0 && encoder_dropout < 1.0)) bad("encoder_dropout must lie in [0, 1)");
  if (!(init_std > 0.0)) bad("init_std must be positive");
}

void to_json(nlohmann::json& j, const ModelConfig& cfg) {
  j = nlohmann::json{{"vocab_size", cfg.vocab_size},
                     {"d_model", cfg.d_model},
                     {"n_layers", cfg.n_layers},
                     {"n_heads", cfg.n_heads},
                     {"d_ff", cfg.d_ff},
                     {"max_seq_len", cfg.max_seq_len},
                     {"pooler_kind", to_string(cfg.pooler_kind)},
                     {"n_classes", cfg.n_classes},
                     {"dropout_p", cfg.dropout_p},
                     {"encoder_dropout", cfg.encoder_dropout},
                     {"pool_include_cls", cfg.pool_include_cls},
                     {"init_std", cfg.init_std}};
}

void from_json(const nlohmann::json& j, ModelConfig& cfg) {
  cfg = ModelConfig{};
  cfg.vocab_size = j.value("vocab_size", cfg.vocab_size);
  cfg.d_model = j.value("d_model", cfg.d_model);
  cfg.n_layers = j.value("n_layers", cfg.n_layers);
  cfg.n_heads = j.value("n_heads", cfg.n_heads);
  cfg.d_ff = j.value("d_ff", cfg.d_ff);
  cfg.max_seq_len = j.value("max_seq_len", cfg.max_seq_len);
  cfg.pooler_kind = parse_pooler_kind(j.value("pooler_kind", to_string(cfg.pooler_kind)));
  cfg.n_classes = j.value("n_classes", cfg.n_classes);
  cfg.dropout_p = j.value("dropout_p", cfg.dropout_p);
  cfg.encoder_dropout = j.value("encoder_dropout", cfg.encoder_dropout);
  cfg.pool_include_cls = j.value("pool_include_cls", cfg.pool_include_cls);
  cfg.init_std = j.value("init_std", cfg.init_std);
}

}  // namespace codemix::model
