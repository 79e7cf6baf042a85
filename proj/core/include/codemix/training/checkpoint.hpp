#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "codemix/metrics/metrics.hpp"
#include "codemix/model/config.hpp"
#include "codemix/model/model.hpp"
#include "codemix/nn/param_store.hpp"
#include "codemix/textprep/clean.hpp"
#include "codemix/textprep/vocab.hpp"
#include "codemix/training/adamw.hpp"
#include "codemix/training/config.hpp"

namespace codemix::training {

struct EpochRecord {
  std::size_t epoch = 0;  // 1-based
  double loss = 0.0;      // example-weighted mean training loss (train mode)
  metrics::WeightedReport train;
  std::optional<metrics::WeightedReport> eval;
};

nlohmann::json to_json(const EpochRecord& record);
EpochRecord epoch_record_from_json(const nlohmann::json& j);

struct Checkpoint {
  static constexpr std::uint32_t kVersion = 1;

  model::ModelConfig model_config;
  TrainConfig train_config;
  textprep::CleanRules clean_rules = textprep::CleanRules::defaults();
  std::vector<std::string> label_names;
  textprep::Vocab vocab;
  nn::ParamStore params;                   // grads are not persisted
  std::optional<OptimizerState> optimizer; // present when training can resume
  std::uint64_t epochs_completed = 0;
  std::vector<EpochRecord> history;
};

// Binary layout, little-endian:
//   "CMCX" | u32 version | u64 n + n bytes JSON (configs, clean rules,
//   label names, history, counters) | u64 n + n bytes vocab text |
//   tensor records: u16 name length, name, u8 rank, u64 dims..., f64 data.
// Optimizer moments are stored as records named "optimizer.m/<param>" and
// "optimizer.v/<param>".
std::string serialize_checkpoint(const Checkpoint& ckpt);
Checkpoint deserialize_checkpoint(std::string_view bytes);

void save_checkpoint(const Checkpoint& ckpt, const std::filesystem::path& path);
Checkpoint load_checkpoint(const std::filesystem::path& path);

// Rebuilds the model and copies parameter values by name; names and shapes
// must match the architecture in model_config exactly.
model::Model model_from_checkpoint(const Checkpoint& ckpt);

}  // namespace codemix::training
