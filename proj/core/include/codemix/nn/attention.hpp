#pragma once

#include <cstddef>
#include <string>

#include "codemix/nn/layers.hpp"

namespace codemix::nn {

// Additive bias applied to scores of padded keys before the softmax. Finite
// so that the backward pass never sees inf - inf.
inline constexpr double kMaskBias = -1e9;

// Multi-head scaled dot-product self-attention over x [n x L x d] with a key
// padding mask [n x L] (1 = live).
struct MultiHeadAttention {
  Linear query;
  Linear key;
  Linear value;
  Linear output;
  std::size_t heads = 1;
  std::size_t d_model = 0;

  struct Cache {
    Tensor x;        // [n x L x d]
    Tensor q, k, v;  // [n x L x d]
    Tensor probs;    // [n x heads x L x L]
    Tensor context;  // [n x L x d], heads concatenated
  };

  static MultiHeadAttention create(ParamStore& store, const std::string& name,
                                   std::size_t d_model, std::size_t heads);

  Tensor forward(const ParamStore& store, const Tensor& x, Mask key_mask,
                 Cache& cache) const;
  Tensor backward(ParamStore& store, const Cache& cache, const Tensor& dy) const;
};

}  // namespace codemix::nn
