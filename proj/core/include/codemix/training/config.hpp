#pragma once

#include <cstddef>
#include <cstdint>

#include <nlohmann/json_fwd.hpp>

#include "codemix/dataset/sampling.hpp"

namespace codemix::training {

// Fine-tuning hyperparameters. The defaults are the published recipe:
// lr 2e-5, max sequence length 512, batch 8, 5 epochs, weight decay 0.01,
// dropout 0.5, AdamW epsilon 1e-6. Betas are the usual AdamW defaults.
struct TrainConfig {
  double lr = 2e-5;
  std::size_t max_seq_len = 512;
  std::size_t batch_size = 8;
  std::size_t epochs = 5;
  double weight_decay = 0.01;
  double dropout = 0.5;
  double adam_eps = 1e-6;
  double beta1 = 0.9;
  double beta2 = 0.999;
  std::uint64_t seed = 42;
  bool balance = true;
  dataset::BalanceMode balance_mode = dataset::BalanceMode::kOversample;
  std::size_t warmup_steps = 0;
  double max_grad_norm = 0.0;  // 0 disables clipping

  void validate() const;

  friend bool operator==(const TrainConfig&, const TrainConfig&) = default;
};

void to_json(nlohmann::json& j, const TrainConfig& cfg);
void from_json(const nlohmann::json& j, TrainConfig& cfg);

}  // namespace codemix::training
