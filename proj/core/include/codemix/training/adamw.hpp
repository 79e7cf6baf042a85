#pragma once

#include <cstdint>
#include <vector>

#include "codemix/nn/param_store.hpp"
#include "codemix/training/config.hpp"

namespace codemix::training {

// First/second moments per parameter (indexed like the ParamStore) and the
// number of completed steps.
struct OptimizerState {
  std::vector<nn::Tensor> m;
  std::vector<nn::Tensor> v;
  std::uint64_t step = 0;

  static OptimizerState zeros_like(const nn::ParamStore& params);

  friend bool operator==(const OptimizerState&, const OptimizerState&) = default;
};

// One AdamW step with decoupled weight decay:
//   t += 1; m = b1 m + (1-b1) g; v = b2 v + (1-b2) g^2
//   theta -= lr (m/(1-b1^t)) / (sqrt(v/(1-b2^t)) + eps) + lr wd theta
// Gradients are zeroed afterwards. A non-finite gradient is a numeric error
// naming the parameter; nothing is modified in that case.
void adamw_step(nn::ParamStore& params, OptimizerState& state, double lr,
                const TrainConfig& cfg);

// Scales all gradients so their global L2 norm is at most max_norm. Returns
// the norm before clipping.
double clip_grad_norm(nn::ParamStore& params, double max_norm);

}  // namespace codemix::training
