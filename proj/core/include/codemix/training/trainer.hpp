#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "codemix/dataset/corpus.hpp"
#include "codemix/metrics/metrics.hpp"
#include "codemix/model/model.hpp"
#include "codemix/textprep/clean.hpp"
#include "codemix/textprep/vocab.hpp"
#include "codemix/training/adamw.hpp"
#include "codemix/training/checkpoint.hpp"
#include "codemix/training/config.hpp"

namespace codemix::training {

// Class probabilities [texts x n_classes] in eval mode. Texts must already be
// cleaned. Results do not depend on batch_size (padding is masked exactly).
nn::Tensor predict_proba(const model::Model& model, const textprep::Vocab& vocab,
                         std::span<const std::string> texts, std::size_t max_seq_len,
                         std::size_t batch_size = 32);

std::vector<std::size_t> argmax_rows(const nn::Tensor& probs);

struct Evaluation {
  metrics::WeightedReport report;
  double loss = 0.0;  // mean cross-entropy
};

Evaluation evaluate(const model::Model& model, const textprep::Vocab& vocab,
                    const dataset::LabeledCorpus& corpus, std::size_t max_seq_len);

// Owns one training run. The same seed reproduces the same run bit for bit;
// a run restored from a checkpoint continues exactly where it stopped.
class Trainer {
 public:
  Trainer(model::ModelConfig model_config, TrainConfig train_config, textprep::Vocab vocab,
          textprep::CleanRules clean_rules, const dataset::LabeledCorpus& train,
          std::optional<dataset::LabeledCorpus> eval = std::nullopt);

  // Requires a checkpoint written by checkpoint() (optimizer state present).
  static Trainer resume(const Checkpoint& ckpt, const dataset::LabeledCorpus& train,
                        std::optional<dataset::LabeledCorpus> eval = std::nullopt);

  bool finished() const noexcept { return epochs_completed_ >= train_config_.epochs; }
  std::uint64_t total_steps() const noexcept { return total_steps_; }
  std::size_t seq_len() const noexcept { return seq_len_; }

  // One pass over the (optionally balanced) training corpus followed by
  // eval-mode metrics on the training and evaluation corpora.
  const EpochRecord& run_epoch();

  Checkpoint checkpoint() const;
  const model::Model& model() const noexcept { return model_; }
  const std::vector<EpochRecord>& history() const noexcept { return history_; }
  const dataset::LabeledCorpus& train_corpus() const noexcept { return train_; }

 private:
  Trainer(const Checkpoint& ckpt, const dataset::LabeledCorpus& train,
          std::optional<dataset::LabeledCorpus> eval);
  void prepare_corpora(const dataset::LabeledCorpus& train);

  model::ModelConfig model_config_;
  TrainConfig train_config_;
  textprep::Vocab vocab_;
  textprep::CleanRules clean_rules_;
  dataset::LabeledCorpus train_;
  std::optional<dataset::LabeledCorpus> eval_;
  model::Model model_;
  OptimizerState optimizer_;
  std::size_t seq_len_ = 0;
  std::uint64_t total_steps_ = 0;
  std::uint64_t epochs_completed_ = 0;
  std::vector<EpochRecord> history_;
};

struct TrainResult {
  Checkpoint checkpoint;
  std::vector<EpochRecord> history;
};

TrainResult train(const model::ModelConfig& model_config,
                  const dataset::LabeledCorpus& train_corpus,
                  const std::optional<dataset::LabeledCorpus>& eval_corpus,
                  const TrainConfig& train_config, const textprep::Vocab& vocab,
                  const textprep::CleanRules& clean_rules = textprep::CleanRules::defaults());

}  // namespace codemix::training
