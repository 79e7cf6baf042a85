#pragma once

#include <cstdint>

#include "codemix/nn/ops.hpp"
#include "codemix/nn/tensor.hpp"

// Sequence poolers over the final hidden states H [batch x L x d] and the
// classification head. `mask` is [batch x L], 1 = live token.
namespace codemix::model {

using nn::Mask;
using nn::Tensor;

struct AttentionPoolCache {
  Tensor weights;  // [batch x L], softmax over live tokens
  Tensor context;  // [batch x d], attention-weighted sum of H rows
};

// Per row: s_i = q . h_i, a = softmax over live i, o = W_h^T (sum_i a_i h_i).
// q: [d], proj (W_h): [d x d].
Tensor attention_pool(const Tensor& hidden, Mask mask, const Tensor& query,
                      const Tensor& proj, AttentionPoolCache* cache);
Tensor attention_pool_backward(const Tensor& hidden, Mask mask, const Tensor& query,
                               const Tensor& proj, const AttentionPoolCache& cache,
                               const Tensor& dpooled, Tensor& dquery, Tensor& dproj);

// Arithmetic mean of live rows.
Tensor mean_pool(const Tensor& hidden, Mask mask);
Tensor mean_pool_backward(const Tensor::Shape& hidden_shape, Mask mask,
                          const Tensor& dpooled);

struct ClassifyCache {
  Tensor input;  // pooled vector after dropout
  nn::DropoutMask dropout;
  Tensor logits;
  Tensor probs;
};

// probs = softmax(dropout(pooled) W_o + b_o). W_o: [d x n_classes].
Tensor classify(const Tensor& pooled, const Tensor& weight, const Tensor& bias,
                double dropout_p, bool train, std::uint64_t seed, ClassifyCache* cache);
// Gradient w.r.t. the pooled input given the gradient w.r.t. the logits.
Tensor classify_backward(const ClassifyCache& cache, const Tensor& weight,
                         const Tensor& dlogits, Tensor& dweight, Tensor& dbias);

}  // namespace codemix::model
