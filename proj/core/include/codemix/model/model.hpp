#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "codemix/model/config.hpp"
#include "codemix/model/pooling.hpp"
#include "codemix/nn/attention.hpp"
#include "codemix/nn/layers.hpp"
#include "codemix/nn/param_store.hpp"
#include "codemix/textprep/tokenizer.hpp"

namespace codemix::model {

struct EncoderLayerCache {
  nn::MultiHeadAttention::Cache attention;
  nn::DropoutMask attention_dropout;
  nn::LayerNormCache norm1;
  Tensor norm1_out;
  Tensor ffn_pre;   // before gelu
  Tensor ffn_act;   // after gelu
  nn::DropoutMask ffn_dropout;
  nn::LayerNormCache norm2;
};

struct EncoderCache {
  std::vector<std::int32_t> token_ids;
  std::vector<std::int32_t> position_ids;
  std::vector<std::uint8_t> mask;
  nn::DropoutMask embedding_dropout;
  std::vector<EncoderLayerCache> layers;
};

struct ForwardCache {
  EncoderCache encoder;
  Tensor hidden;                     // [batch x L x d]
  std::vector<std::uint8_t> pool_mask;
  AttentionPoolCache attention_pool;
  Tensor pooled;
  ClassifyCache head;
};

struct ForwardOutput {
  Tensor logits;  // [batch x n_classes]
  Tensor probs;
};

// Transformer encoder (learned token + position embeddings, post-norm
// blocks) followed by an attention or mean pooler and a softmax classifier.
// Forward passes are const and keep all intermediate state in the
// caller-owned cache, so concurrent inference on one model is safe.
class Model {
 public:
  explicit Model(const ModelConfig& cfg);

  // N(0, init_std^2) for weight matrices and embeddings; zero biases and
  // pooler query; layer-norm gamma 1, beta 0.
  void initialize(std::uint64_t seed);

  const ModelConfig& config() const noexcept { return cfg_; }
  nn::ParamStore& params() noexcept { return store_; }
  const nn::ParamStore& params() const noexcept { return store_; }

  // Last-layer hidden states [batch x L x d_model].
  Tensor encode(const textprep::TokenBatch& batch, bool train, std::uint64_t seed,
                EncoderCache* cache = nullptr) const;

  ForwardOutput forward(const textprep::TokenBatch& batch, bool train,
                        std::uint64_t seed, ForwardCache* cache = nullptr) const;

  // Accumulates parameter gradients given dL/dlogits.
  void backward(const ForwardCache& cache, const Tensor& dlogits);

  // Accumulates encoder parameter gradients given dL/d(hidden states).
  void encoder_backward(const EncoderCache& cache, const Tensor& dhidden);

  std::vector<std::size_t> predict(const textprep::TokenBatch& batch) const;

 private:
  struct EncoderLayer {
    nn::MultiHeadAttention attention;
    nn::LayerNorm norm1;
    nn::Linear ffn_in;
    nn::Linear ffn_out;
    nn::LayerNorm norm2;
  };

  std::vector<std::uint8_t> pooling_mask(const textprep::TokenBatch& batch) const;

  ModelConfig cfg_;
  nn::ParamStore store_;
  nn::Embedding token_embedding_;
  nn::Embedding position_embedding_;
  std::vector<EncoderLayer> layers_;
  std::optional<nn::ParamId> pool_query_;
  std::optional<nn::ParamId> pool_proj_;
  nn::Linear classifier_;
};

}  // namespace codemix::model
