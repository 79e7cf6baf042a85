#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "codemix/nn/tensor.hpp"

// Stateless forward/backward pairs. Backward functions *accumulate* into the
// parameter-gradient tensors they are given and return the input gradient.
// Row-wise ops treat any tensor as [rows x cols] over its trailing dimension.
namespace codemix::nn {

using Mask = std::span<const std::uint8_t>;

// y = x W (+ b). x: [.. x d_in], W: [d_in x d_out], b: [d_out] or null.
Tensor linear(const Tensor& x, const Tensor& weight, const Tensor* bias);
Tensor linear_backward(const Tensor& x, const Tensor& weight, const Tensor& dy,
                       Tensor& dweight, Tensor* dbias);

// Row softmax with max subtraction. With a mask (same row layout, 1 = live),
// masked entries get weight exactly 0; a row with no live entry is a numeric
// error.
Tensor softmax_rows(const Tensor& x, Mask mask = {});
Tensor softmax_rows_backward(const Tensor& y, const Tensor& dy, Mask mask = {});

struct LayerNormCache {
  Tensor normalized;               // (x - mean) / sqrt(var + eps)
  std::vector<double> inv_std;     // per row
};

inline constexpr double kLayerNormEps = 1e-12;

Tensor layer_norm(const Tensor& x, const Tensor& gamma, const Tensor& beta,
                  double eps, LayerNormCache* cache);
Tensor layer_norm_backward(const LayerNormCache& cache, const Tensor& gamma,
                           const Tensor& dy, Tensor& dgamma, Tensor& dbeta);

// tanh approximation: 0.5 x (1 + tanh(sqrt(2/pi) (x + 0.044715 x^3))).
Tensor gelu(const Tensor& x);
Tensor gelu_backward(const Tensor& x, const Tensor& dy);

// Rows of `table` [V x d] selected by ids; result [ids.size() x d].
Tensor embedding_lookup(std::span<const std::int32_t> ids, const Tensor& table);
void embedding_backward(std::span<const std::int32_t> ids, const Tensor& dy,
                        Tensor& dtable);

struct DropoutMask {
  std::vector<std::uint8_t> keep;  // empty when inactive (eval or p == 0)
  double scale = 1.0;
};

// Training: zero each entry with probability p (SplitMix64(seed) stream),
// scale survivors by 1/(1-p). Eval: identity.
Tensor dropout(const Tensor& x, double p, bool train, std::uint64_t seed,
               DropoutMask* mask);
Tensor dropout_backward(const DropoutMask& mask, const Tensor& dy);

}  // namespace codemix::nn
