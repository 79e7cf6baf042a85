#include "codemix/training/trainer.hpp"

#include <algorithm>
#include <cmath>

#include "codemix/dataset/sampling.hpp"
#include "codemix/error.hpp"
#include "codemix/random.hpp"
#include "codemix/textprep/tokenizer.hpp"
#include "codemix/training/loss.hpp"
#include "codemix/training/schedule.hpp"

namespace codemix::training {
namespace {

// Stream tags for derive_seed.
constexpr std::uint64_t kInitStream = 1;
constexpr std::uint64_t kBalanceStream = 2;
constexpr std::uint64_t kShuffleStream = 3;
constexpr std::uint64_t kDropoutStream = 4;

model::ModelConfig effective_model_config(model::ModelConfig cfg, const TrainConfig& tcfg,
                                          const textprep::Vocab& vocab,
                                          std::size_t n_classes) {
  cfg.vocab_size = vocab.size();
  cfg.n_classes = n_classes;
  cfg.dropout_p = tcfg.dropout;
  return cfg;
}

}  // namespace

nn::Tensor predict_proba(const model::Model& model, const textprep::Vocab& vocab,
                         std::span<const std::string> texts, std::size_t max_seq_len,
                         std::size_t batch_size) {
  const std::size_t classes = model.config().n_classes;
  nn::Tensor probs({texts.size(), classes});
  for (std::size_t start = 0; start < texts.size(); start += batch_size) {
    const std::size_t end = std::min(texts.size(), start + batch_size);
    const auto batch = textprep::encode_batch(texts.subspan(start, end - start), vocab, max_seq_len);
    const auto out = model.forward(batch, /*train=*/false, 0);
    std::copy(out.probs.data().begin(), out.probs.data().end(), probs.row(start));
  }
  return probs;
}

std::vector<std::size_t> argmax_rows(const nn::Tensor& probs) {
  std::vector<std::size_t> out(probs.rows());
  for (std::size_t r = 0; r < probs.rows(); ++r) {
    const double* row = probs.row(r);
    out[r] = static_cast<std::size_t>(std::max_element(row, row + probs.cols()) - row);
  }
  return out;
}

Evaluation evaluate(const model::Model& model, const textprep::Vocab& vocab,
                    const dataset::LabeledCorpus& corpus, std::size_t max_seq_len) {
  if (corpus.empty()) fail(ErrorKind::kData, "evaluate: empty corpus");
  const auto texts = corpus.texts();
  const auto labels = corpus.labels();
  const nn::Tensor probs = predict_proba(model, vocab, texts, max_seq_len);
  const auto preds = argmax_rows(probs);
  Evaluation ev;
  ev.report = metrics::weighted_prf(metrics::confusion(preds, labels, corpus.num_classes()),
                                    corpus.label_names());
  ev.loss = cross_entropy_loss(probs, labels).loss;
  return ev;
}

Trainer::Trainer(model::ModelConfig model_config, TrainConfig train_config,
                 textprep::Vocab vocab, textprep::CleanRules clean_rules,
                 const dataset::LabeledCorpus& train,
                 std::optional<dataset::LabeledCorpus> eval)
    : model_config_(effective_model_config(model_config, train_config, vocab,
                                           train.num_classes())),
      train_config_(train_config),
      vocab_(std::move(vocab)),
      clean_rules_(std::move(clean_rules)),
      eval_(std::move(eval)),
      model_(model_config_) {
  train_config_.validate();
  prepare_corpora(train);
  model_.initialize(derive_seed(train_config_.seed, {kInitStream}));
  optimizer_ = OptimizerState::zeros_like(model_.params());
}

Trainer::Trainer(const Checkpoint& ckpt, const dataset::LabeledCorpus& train,
                 std::optional<dataset::LabeledCorpus> eval)
    : model_config_(ckpt.model_config),
      train_config_(ckpt.train_config),
      vocab_(ckpt.vocab),
      clean_rules_(ckpt.clean_rules),
      eval_(std::move(eval)),
      model_(model_from_checkpoint(ckpt)),
      epochs_completed_(ckpt.epochs_completed),
      history_(ckpt.history) {
  if (!ckpt.optimizer) {
    fail(ErrorKind::kConfig, "resume: checkpoint carries no optimizer state");
  }
  if (train.label_names() != ckpt.label_names) {
    fail(ErrorKind::kSchema, "resume: corpus label names differ from the checkpoint");
  }
  prepare_corpora(train);
  optimizer_ = *ckpt.optimizer;
}

Trainer Trainer::resume(const Checkpoint& ckpt, const dataset::LabeledCorpus& train,
                        std::optional<dataset::LabeledCorpus> eval) {
  return Trainer(ckpt, train, std::move(eval));
}

void Trainer::prepare_corpora(const dataset::LabeledCorpus& train) {
  if (eval_ && eval_->label_names() != train.label_names()) {
    fail(ErrorKind::kSchema, "train: train and eval corpora have different label names");
  }
  if (train.num_classes() != model_config_.n_classes) {
    fail(ErrorKind::kSchema, "train: corpus class count does not match the model");
  }
  if (train_config_.epochs > 0 && train.empty()) {
    fail(ErrorKind::kData, "train: empty training corpus");
  }
  train_ = train_config_.balance && !train.empty()
               ? dataset::uniform_sample(train, derive_seed(train_config_.seed, {kBalanceStream}),
                                         train_config_.balance_mode)
               : train;
  seq_len_ = std::min(train_config_.max_seq_len, model_config_.max_seq_len);
  const std::uint64_t per_epoch =
      (train_.size() + train_config_.batch_size - 1) / train_config_.batch_size;
  total_steps_ = per_epoch * train_config_.epochs;
  if (train_config_.warmup_steps > 0 && train_config_.warmup_steps >= total_steps_) {
    fail(ErrorKind::kConfig, "train: warmup_steps must be below the total step count");
  }
}

const EpochRecord& Trainer::run_epoch() {
  if (finished()) fail(ErrorKind::kConfig, "train: all epochs already completed");
  const std::uint64_t epoch = epochs_completed_;
  const auto epoch_batches = dataset::batches(
      train_, train_config_.batch_size, derive_seed(train_config_.seed, {kShuffleStream, epoch}));

  double loss_sum = 0.0;
  auto& params = model_.params();
  for (std::size_t b = 0; b < epoch_batches.size(); ++b) {
    const auto& batch = epoch_batches[b];
    const std::uint64_t step = optimizer_.step;
    const double lr = lr_at(step, total_steps_, train_config_.lr, train_config_.warmup_steps);

    const auto tokens = textprep::encode_batch(batch.texts, vocab_, seq_len_);
    model::ForwardCache cache;
    const auto out = model_.forward(tokens, /*train=*/true,
                                    derive_seed(train_config_.seed, {kDropoutStream, step}),
                                    &cache);
    const auto loss = cross_entropy_loss(out.probs, batch.labels);
    if (!std::isfinite(loss.loss)) {
      fail(ErrorKind::kNumeric, "train: non-finite loss in epoch " + std::to_string(epoch + 1) +
                                    ", batch " + std::to_string(b));
    }
    loss_sum += loss.loss * static_cast<double>(batch.labels.size());

    params.zero_grad();
    model_.backward(cache, loss.dlogits);
    if (train_config_.max_grad_norm > 0.0) clip_grad_norm(params, train_config_.max_grad_norm);
    adamw_step(params, optimizer_, lr, train_config_);
  }

  EpochRecord record;
  record.epoch = static_cast<std::size_t>(epoch + 1);
  record.loss = loss_sum / static_cast<double>(train_.size());
  record.train = evaluate(model_, vocab_, train_, seq_len_).report;
  if (eval_ && !eval_->empty()) record.eval = evaluate(model_, vocab_, *eval_, seq_len_).report;
  ++epochs_completed_;
  history_.push_back(std::move(record));
  return history_.back();
}

Checkpoint Trainer::checkpoint() const {
  Checkpoint ckpt;
  ckpt.model_config = model_config_;
  ckpt.train_config = train_config_;
  ckpt.clean_rules = clean_rules_;
  ckpt.label_names = train_.label_names();
  ckpt.vocab = vocab_;
  for (const auto& p : model_.params().params()) ckpt.params.add(p.name, p.value);
  ckpt.optimizer = optimizer_;
  ckpt.epochs_completed = epochs_completed_;
  ckpt.history = history_;
  return ckpt;
}

TrainResult train(const model::ModelConfig& model_config,
                  const dataset::LabeledCorpus& train_corpus,
                  const std::optional<dataset::LabeledCorpus>& eval_corpus,
                  const TrainConfig& train_config, const textprep::Vocab& vocab,
                  const textprep::CleanRules& clean_rules) {
  Trainer trainer(model_config, train_config, vocab, clean_rules, train_corpus, eval_corpus);
  while (!trainer.finished()) trainer.run_epoch();
  return TrainResult{trainer.checkpoint(), trainer.history()};
}

}  // namespace codemix::training
