#pragma once

#include <cstddef>
#include <string>

#include <nlohmann/json_fwd.hpp>

namespace codemix::model {

enum class PoolerKind { kAttention, kMean };

PoolerKind parse_pooler_kind(const std::string& name);
std::string to_string(PoolerKind kind);

inline constexpr std::size_t kMaxSeqLenCeiling = 512;

// Desk-scale defaults; the classifier dropout default is the fine-tuning
// value (0.5), encoder-internal dropout is separate.
struct ModelConfig {
  std::size_t vocab_size = 4;
  std::size_t d_model = 64;
  std::size_t n_layers = 2;
  std::size_t n_heads = 4;
  std::size_t d_ff = 128;
  std::size_t max_seq_len = 128;
  PoolerKind pooler_kind = PoolerKind::kAttention;
  std::size_t n_classes = 2;
  double dropout_p = 0.5;        // on the pooled vector
  double encoder_dropout = 0.1;  // embeddings, attention and FFN outputs
  bool pool_include_cls = true;
  double init_std = 0.02;

  void validate() const;

  friend bool operator==(const ModelConfig&, const ModelConfig&) = default;
};

void to_json(nlohmann::json& j, const ModelConfig& cfg);
void from_json(const nlohmann::json& j, ModelConfig& cfg);

}  // namespace codemix::model
