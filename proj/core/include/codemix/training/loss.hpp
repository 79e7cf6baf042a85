#pragma once

#include <cstddef>
#include <span>

#include "codemix/nn/tensor.hpp"

namespace codemix::training {

struct LossResult {
  double loss = 0.0;
  nn::Tensor dlogits;  // (probs - onehot) / batch
};

// Mean over the batch of -log probs[i][label_i]. For two classes this is the
// binary cross-entropy of the positive-class probability.
LossResult cross_entropy_loss(const nn::Tensor& probs, std::span<const std::size_t> labels);

}  // namespace codemix::training
