#include "codemix/model/model.hpp"

#include <algorithm>
#include <string>

#include "codemix/error.hpp"
#include "codemix/random.hpp"

namespace codemix::model {
namespace {

// Dropout sites get disjoint streams derived from the per-step seed.
constexpr std::uint64_t kEmbeddingSite = 0;
constexpr std::uint64_t kHeadSite = 1'000'000;
std::uint64_t attention_site(std::size_t layer) { return 1 + 2 * layer; }
std::uint64_t ffn_site(std::size_t layer) { return 2 + 2 * layer; }

bool ends_with(const std::string& s, std::string_view suffix) {
  return s.size() >= suffix.size() && s.compare(s.size() - suffix.size(), suffix.size(), suffix) == 0;
}

}  // namespace

Model::Model(const ModelConfig& cfg) : cfg_(cfg) {
  cfg_.validate();
  const std::size_t d = cfg_.d_model;
  token_embedding_ = nn::Embedding::create(store_, "embeddings.token", cfg_.vocab_size, d);
  position_embedding_ =
      nn::Embedding::create(store_, "embeddings.position", cfg_.max_seq_len, d);
  for (std::size_t l = 0; l < cfg_.n_layers; ++l) {
    const std::string prefix = "encoder.layer" + std::to_string(l);
    EncoderLayer layer;
    layer.attention =
        nn::MultiHeadAttention::create(store_, prefix + ".attention", d, cfg_.n_heads);
    layer.norm1 = nn::LayerNorm::create(store_, prefix + ".norm1", d);
    layer.ffn_in = nn::Linear::create(store_, prefix + ".ffn.in", d, cfg_.d_ff);
    layer.ffn_out = nn::Linear::create(store_, prefix + ".ffn.out", cfg_.d_ff, d);
    layer.norm2 = nn::LayerNorm::create(store_, prefix + ".norm2", d);
    layers_.push_back(layer);
  }
  if (cfg_.pooler_kind == PoolerKind::kAttention) {
    pool_query_ = store_.add("pooler.query", Tensor({d}));
    pool_proj_ = store_.add("pooler.proj", Tensor({d, d}));
  }
  classifier_ = nn::Linear::create(store_, "classifier", d, cfg_.n_classes);
}

void Model::initialize(std::uint64_t seed) {
  SplitMix64 rng(seed);
  for (auto& p : store_.params()) {
    double fill = 0.0;
    bool random = false;
    if (ends_with(p.name, ".gamma")) {
      fill = 1.0;
    } else if (ends_with(p.name, ".bias") || ends_with(p.name, ".beta") ||
               p.name == "pooler.query") {
      fill = 0.0;
    } else {
      random = true;
    }
    for (auto& v : p.value.data()) v = random ? cfg_.init_std * rng.normal() : fill;
    p.grad.fill(0.0);
  }
}

Tensor Model::encode(const textprep::TokenBatch& batch, bool train, std::uint64_t seed,
                     EncoderCache* cache) const {
  const std::size_t n = batch.batch;
  const std::size_t len = batch.seq_len;
  const std::size_t d = cfg_.d_model;
  if (n == 0 || len == 0) fail(ErrorKind::kData, "encode: empty batch");
  if (len > cfg_.max_seq_len) {
    fail(ErrorKind::kDimension, "encode: sequence length " + std::to_string(len) +
                                    " exceeds max_seq_len " +
                                    std::to_string(cfg_.max_seq_len));
  }
  EncoderCache local;
  EncoderCache& c = cache ? *cache : local;
  c.token_ids = batch.ids;
  c.mask = batch.mask;
  c.position_ids.resize(n * len);
  for (std::size_t i = 0; i < n * len; ++i) {
    c.position_ids[i] = static_cast<std::int32_t>(i % len);
  }

  Tensor x = token_embedding_.forward(store_, c.token_ids);
  x += position_embedding_.forward(store_, c.position_ids);
  x = nn::dropout(x, cfg_.encoder_dropout, train, derive_seed(seed, {kEmbeddingSite}),
                  &c.embedding_dropout)
          .reshaped({n, len, d});

  c.layers.resize(layers_.size());
  for (std::size_t l = 0; l < layers_.size(); ++l) {
    const auto& layer = layers_[l];
    auto& lc = c.layers[l];
    Tensor a = layer.attention.forward(store_, x, c.mask, lc.attention);
    a = nn::dropout(a, cfg_.encoder_dropout, train, derive_seed(seed, {attention_site(l)}),
                    &lc.attention_dropout);
    a += x;
    lc.norm1_out = layer.norm1.forward(store_, a, lc.norm1);
    lc.ffn_pre = layer.ffn_in.forward(store_, lc.norm1_out);
    lc.ffn_act = nn::gelu(lc.ffn_pre);
    Tensor f = layer.ffn_out.forward(store_, lc.ffn_act);
    f = nn::dropout(f, cfg_.encoder_dropout, train, derive_seed(seed, {ffn_site(l)}),
                    &lc.ffn_dropout);
    f += lc.norm1_out;
    x = layer.norm2.forward(store_, f, lc.norm2);
  }
  return x;
}

void Model::encoder_backward(const EncoderCache& cache, const Tensor& dhidden) {
  Tensor dx = dhidden;
  for (std::size_t l = layers_.size(); l-- > 0;) {
    const auto& layer = layers_[l];
    const auto& lc = cache.layers[l];
    const Tensor dsum2 = layer.norm2.backward(store_, lc.norm2, dx);
    const Tensor dffn = nn::dropout_backward(lc.ffn_dropout, dsum2);
    const Tensor dact = layer.ffn_out.backward(store_, lc.ffn_act, dffn);
    const Tensor dpre = nn::gelu_backward(lc.ffn_pre, dact);
    Tensor dnorm1 = layer.ffn_in.backward(store_, lc.norm1_out, dpre);
    dnorm1 += dsum2;
    const Tensor dsum1 = layer.norm1.backward(store_, lc.norm1, dnorm1);
    const Tensor dattn = nn::dropout_backward(lc.attention_dropout, dsum1);
    dx = layer.attention.backward(store_, lc.attention, dattn);
    dx += dsum1;
  }
  const std::size_t rows = cache.token_ids.size();
  const Tensor demb =
      nn::dropout_backward(cache.embedding_dropout, dx).reshaped({rows, cfg_.d_model});
  token_embedding_.backward(store_, cache.token_ids, demb);
  position_embedding_.backward(store_, cache.position_ids, demb);
}

std::vector<std::uint8_t> Model::pooling_mask(const textprep::TokenBatch& batch) const {
  std::vector<std::uint8_t> mask = batch.mask;
  if (cfg_.pool_include_cls) return mask;
  for (std::size_t b = 0; b < batch.batch; ++b) {
    // Keep CLS when it is the only live token so the row stays poolable.
    if (batch.seq_len > 1 && batch.live(b, 1)) mask[b * batch.seq_len] = 0;
  }
  return mask;
}

ForwardOutput Model::forward(const textprep::TokenBatch& batch, bool train,
                             std::uint64_t seed, ForwardCache* cache) const {
  ForwardCache local;
  ForwardCache& c = cache ? *cache : local;
  c.hidden = encode(batch, train, seed, &c.encoder);
  c.pool_mask = pooling_mask(batch);
  if (cfg_.pooler_kind == PoolerKind::kAttention) {
    c.pooled = attention_pool(c.hidden, c.pool_mask, store_.value(*pool_query_),
                              store_.value(*pool_proj_), &c.attention_pool);
  } else {
    c.pooled = mean_pool(c.hidden, c.pool_mask);
  }
  classify(c.pooled, store_.value(classifier_.weight), store_.value(*classifier_.bias),
           cfg_.dropout_p, train, derive_seed(seed, {kHeadSite}), &c.head);
  return ForwardOutput{c.head.logits, c.head.probs};
}

void Model::backward(const ForwardCache& cache, const Tensor& dlogits) {
  const Tensor dpooled =
      classify_backward(cache.head, store_.value(classifier_.weight), dlogits,
                        store_.grad(classifier_.weight), store_.grad(*classifier_.bias));
  Tensor dhidden;
  if (cfg_.pooler_kind == PoolerKind::kAttention) {
    dhidden = attention_pool_backward(
        cache.hidden, cache.pool_mask, store_.value(*pool_query_), store_.value(*pool_proj_),
        cache.attention_pool, dpooled, store_.grad(*pool_query_), store_.grad(*pool_proj_));
  } else {
    dhidden = mean_pool_backward(cache.hidden.shape(), cache.pool_mask, dpooled);
  }
  encoder_backward(cache.encoder, dhidden);
}

std::vector<std::size_t> Model::predict(const textprep::TokenBatch& batch) const {
  const auto out = forward(batch, /*train=*/false, 0);
  std::vector<std::size_t> labels(batch.batch);
  for (std::size_t b = 0; b < batch.batch; ++b) {
    const double* row = out.probs.row(b);
    labels[b] = static_cast<std::size_t>(
        std::max_element(row, row + out.probs.cols()) - row);
  }
  return labels;
}

}  // namespace codemix::model
