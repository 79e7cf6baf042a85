#include "codemix/training/config.hpp"

#include <nlohmann/json.hpp>
#include <string>

#include "codemix/error.hpp"

namespace codemix::training {

void TrainConfig::validate() const {
  auto bad = [](const std::string& msg) { fail(ErrorKind::kConfig, "train config: " + msg); };
  if (!(lr > 0.0)) bad("lr must be positive");
  if (max_seq_len < 2) bad("max_seq_len must be >= 2");
  if (batch_size == 0) bad("batch_size must be positive");
  if (!(weight_decay >= 0.0)) bad("weight_decay must be non-negative");
  if (!(dropout >= 0.0 && dropout < 1.0)) bad("dropout must lie in [0, 1)");
  if (!(adam_eps > 0.0)) bad("adam_eps must be positive");
  if (!(beta1 > 0.0 && beta1 < 1.0) || !(beta2 > 0.0 && beta2 < 1.0)) {
    bad("betas must lie in (0, 1)");
  }
  if (!(max_grad_norm >= 0.0)) bad("max_grad_norm must be non-negative");
}

void to_json(nlohmann::json& j, const TrainConfig& cfg) {
  j = nlohmann::json{{"lr", cfg.lr},
                     {"max_seq_len", cfg.max_seq_len},
                     {"batch_size", cfg.batch_size},
                     {"epochs", cfg.epochs},
                     {"weight_decay", cfg.weight_decay},
                     {"dropout", cfg.dropout},
                     {"adam_eps", cfg.adam_eps},
                     {"beta1", cfg.beta1},
                     {"beta2", cfg.beta2},
                     {"seed", cfg.seed},
                     {"balance", cfg.balance},
                     {"balance_mode", dataset::to_string(cfg.balance_mode)},
                     {"warmup_steps", cfg.warmup_steps},
                     {"max_grad_norm", cfg.max_grad_norm}};
}

void from_json(const nlohmann::json& j, TrainConfig& cfg) {
  cfg = TrainConfig{};
  cfg.lr = j.value("lr", cfg.lr);
  cfg.max_seq_len = j.value("max_seq_len", cfg.max_seq_len);
  cfg.batch_size = j.value("batch_size", cfg.batch_size);
  cfg.epochs = j.value("epochs", cfg.epochs);
  cfg.weight_decay = j.value("weight_decay", cfg.weight_decay);
  cfg.dropout = j.value("dropout", cfg.dropout);
  cfg.adam_eps = j.value("adam_eps", cfg.adam_eps);
  cfg.beta1 = j.value("beta1", cfg.beta1);
  cfg.beta2 = j.value("beta2", cfg.beta2);
  cfg.seed = j.value("seed", cfg.seed);
  cfg.balance = j.value("balance", cfg.balance);
  cfg.balance_mode = dataset::parse_balance_mode(
      j.value("balance_mode", dataset::to_string(cfg.balance_mode)));
  cfg.warmup_steps = j.value("warmup_steps", cfg.warmup_steps);
  cfg.max_grad_norm = j.value("max_grad_norm", cfg.max_grad_norm);
}

}  // namespace codemix::training
