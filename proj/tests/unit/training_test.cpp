#include <chrono>
#include <cmath>

#include <gtest/gtest.h>
#include <nlohmann/json.hpp>

#include "codemix/error.hpp"
#include "codemix/nn/grad_check.hpp"
#include "codemix/training/adamw.hpp"
#include "codemix/training/loss.hpp"
#include "codemix/training/schedule.hpp"
#include "codemix/training/trainer.hpp"
#include "codemix/textprep/vocab.hpp"
#include "support/fixtures.hpp"
#include "support/oracles.hpp"

namespace codemix::training {
namespace {

using codemix::testing::desk_model_config;
using codemix::testing::numeric_gradient;
using codemix::testing::random_tensor;
using codemix::testing::sanity_train_config;
using codemix::testing::separable_corpus;
using model::PoolerKind;
using nn::Tensor;

TEST(TrainConfig, DefaultsAreThePublishedRecipe) {
  const TrainConfig cfg;
  EXPECT_EQ(cfg.lr, 2e-5);
  EXPECT_EQ(cfg.max_seq_len, 512u);
  EXPECT_EQ(cfg.batch_size, 8u);
  EXPECT_EQ(cfg.epochs, 5u);
  EXPECT_EQ(cfg.weight_decay, 0.01);
  EXPECT_EQ(cfg.dropout, 0.5);
  EXPECT_EQ(cfg.adam_eps, 1e-6);
  EXPECT_EQ(cfg.beta1, 0.9);
  EXPECT_EQ(cfg.beta2, 0.999);
  EXPECT_EQ(cfg.warmup_steps, 0u);
  EXPECT_EQ(cfg.max_grad_norm, 0.0);
  EXPECT_NO_THROW(cfg.validate());
  const nlohmann::json j = cfg;
  EXPECT_EQ(j.get<TrainConfig>(), cfg);
  TrainConfig bad = cfg;
  bad.dropout = 1.0;
  EXPECT_THROW(bad.validate(), Error);
  bad = cfg;
  bad.batch_size = 0;
  EXPECT_THROW(bad.validate(), Error);
  bad = cfg;
  bad.lr = -1;
  EXPECT_THROW(bad.validate(), Error);
}

Tensor softmax_of(std::initializer_list<double> logits) {
  double z = 0;
  for (double l : logits) z += std::exp(l);
  Tensor p({1, logits.size()});
  std::size_t i = 0;
  for (double l : logits) p[i++] = std::exp(l) / z;
  return p;
}

TEST(Loss, Examples) {
  const std::size_t zero[] = {0}, one[] = {1};
  EXPECT_NEAR(cross_entropy_loss(softmax_of({0, 0}), one).loss, std::log(2.0), 1e-15);
  EXPECT_NEAR(cross_entropy_loss(softmax_of({0, 0}), one).loss, 0.693147, 1e-6);
  EXPECT_EQ(cross_entropy_loss(Tensor::matrix({{1.0, 0.0}}), zero).loss, 0.0);
  EXPECT_NEAR(cross_entropy_loss(softmax_of({2, 0}), zero).loss, std::log1p(std::exp(-2.0)),
              1e-15);
  EXPECT_NEAR(cross_entropy_loss(softmax_of({2, 0}), zero).loss, 0.126928, 1e-6);
  const std::size_t bad[] = {2};
  try {
    cross_entropy_loss(softmax_of({0, 0}), bad);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kData);
  }
}

TEST(Loss, TwoClassIsBinaryCrossEntropy) {
  SplitMix64 rng(1);
  for (int i = 0; i < 50; ++i) {
    const double a = 4 * rng.uniform() - 2, b = 4 * rng.uniform() - 2;
    const Tensor p = softmax_of({a, b});
    const std::size_t y = rng.below(2);
    const std::size_t labels[] = {y};
    const double bce = -(y * std::log(p[1]) + (1.0 - y) * std::log(1.0 - p[1]));
    EXPECT_NEAR(cross_entropy_loss(p, labels).loss, bce, 1e-12);
  }
}

TEST(Loss, GradientThroughSoftmaxMatchesFiniteDifferences) {
  SplitMix64 rng(2);
  for (int trial = 0; trial < 10; ++trial) {
    const Tensor logits = random_tensor({4, 3}, rng, 3.0);
    std::vector<std::size_t> labels(4);
    for (auto& l : labels) l = rng.below(3);
    auto f = [&](const std::vector<double>& x) {
      Tensor z({4, 3}, x);
      Tensor p({4, 3});
      for (std::size_t r = 0; r < 4; ++r) {
        double s = 0;
        for (std::size_t c = 0; c < 3; ++c) s += std::exp(z.at(r, c));
        for (std::size_t c = 0; c < 3; ++c) p.at(r, c) = std::exp(z.at(r, c)) / s;
      }
      return cross_entropy_loss(p, labels).loss;
    };
    const std::vector<double> x(logits.data().begin(), logits.data().end());
    const auto numeric = numeric_gradient(f, x);
    Tensor p({4, 3});
    for (std::size_t r = 0; r < 4; ++r) {
      double s = 0;
      for (std::size_t c = 0; c < 3; ++c) s += std::exp(logits.at(r, c));
      for (std::size_t c = 0; c < 3; ++c) p.at(r, c) = std::exp(logits.at(r, c)) / s;
    }
    const Tensor analytic = cross_entropy_loss(p, labels).dlogits;
    for (std::size_t i = 0; i < x.size(); ++i) {
      ASSERT_LT(nn::grad_rel_error(analytic[i], numeric[i]), 1e-5);
    }
  }
}

struct OneScalar {
  nn::ParamStore store;
  nn::ParamId id;
  explicit OneScalar(double theta, double grad) {
    id = store.add("theta", Tensor::vector({theta}));
    store.grad(id)[0] = grad;
  }
};

TrainConfig adam_config(double wd) {
  TrainConfig cfg;
  cfg.weight_decay = wd;
  cfg.adam_eps = 0.0;
  return cfg;
}

TEST(AdamW, SingleStepWithoutDecay) {
  OneScalar s(1.0, 1.0);
  auto state = OptimizerState::zeros_like(s.store);
  adamw_step(s.store, state, 0.1, adam_config(0.0));
  EXPECT_EQ(s.store.value(s.id)[0], 0.9);
  EXPECT_EQ(state.step, 1u);
  EXPECT_EQ(s.store.grad(s.id)[0], 0.0);
}

TEST(AdamW, SingleStepWithDecoupledDecay) {
  OneScalar s(1.0, 1.0);
  auto state = OptimizerState::zeros_like(s.store);
  adamw_step(s.store, state, 0.1, adam_config(0.01));
  EXPECT_EQ(s.store.value(s.id)[0], 0.899);
}

TEST(AdamW, ZeroGradientIsFixedPointWithoutDecay) {
  SplitMix64 rng(3);
  nn::ParamStore store;
  store.add("a", random_tensor({3, 3}, rng));
  const Tensor before = store.params()[0].value;
  auto state = OptimizerState::zeros_like(store);
  TrainConfig cfg = adam_config(0.0);
  cfg.adam_eps = 1e-6;
  for (int i = 0; i < 3; ++i) adamw_step(store, state, 0.1, cfg);
  EXPECT_EQ(store.params()[0].value, before);
}

TEST(AdamW, ZeroGradientShrinksByDecayFactor) {
  SplitMix64 rng(4);
  nn::ParamStore store;
  store.add("a", random_tensor({5}, rng));
  const Tensor before = store.params()[0].value;
  auto state = OptimizerState::zeros_like(store);
  TrainConfig cfg = adam_config(0.01);
  cfg.adam_eps = 1e-6;
  adamw_step(store, state, 0.1, cfg);
  for (std::size_t i = 0; i < 5; ++i) {
    EXPECT_EQ(std::abs(store.params()[0].value[i]), std::abs(before[i]) * (1.0 - 0.1 * 0.01));
  }
}

TEST(AdamW, NonFiniteGradientNamesParameter) {
  OneScalar s(1.0, std::nan(""));
  auto state = OptimizerState::zeros_like(s.store);
  try {
    adamw_step(s.store, state, 0.1, adam_config(0.0));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kNumeric);
    EXPECT_NE(std::string(e.what()).find("theta"), std::string::npos);
  }
  EXPECT_EQ(s.store.value(s.id)[0], 1.0);
  EXPECT_EQ(state.step, 0u);
}

TEST(ClipGradNorm, ScalesToMaxNorm) {
  nn::ParamStore store;
  const auto a = store.add("a", Tensor::vector({0, 0}));
  store.grad(a) = Tensor::vector({3, 4});
  EXPECT_DOUBLE_EQ(clip_grad_norm(store, 1.0), 5.0);
  EXPECT_NEAR(store.grad(a)[0], 0.6, 1e-15);
  EXPECT_NEAR(store.grad(a)[1], 0.8, 1e-15);
}

TEST(Schedule, Endpoints) {
  EXPECT_EQ(lr_at(0, 100, 2e-5), 2e-5);
  EXPECT_EQ(lr_at(100, 100, 2e-5), 0.0);
  EXPECT_EQ(lr_at(50, 100, 2e-5), 1e-5);
  EXPECT_THROW(lr_at(0, 0, 2e-5), Error);
  EXPECT_THROW(lr_at(101, 100, 2e-5), Error);
}

TEST(Schedule, AffineAndNonIncreasing) {
  const std::uint64_t total = 625;
  for (std::uint64_t s = 1; s <= total; ++s) {
    ASSERT_LE(lr_at(s, total, 2e-5), lr_at(s - 1, total, 2e-5));
  }
  SplitMix64 rng(5);
  for (int i = 0; i < 100; ++i) {
    const std::uint64_t a = rng.below(total + 1), b = rng.below(total + 1),
                        c = rng.below(total + 1);
    const double ya = lr_at(a, total, 2e-5), yb = lr_at(b, total, 2e-5),
                 yc = lr_at(c, total, 2e-5);
    // Steps on the normalized axis s / T so the bound does not scale with T.
    const double ta = double(a) / total, tb = double(b) / total, tc = double(c) / total;
    const double cross = (tb - ta) * (yc - ya) - (tc - ta) * (yb - ya);
    ASSERT_LE(std::abs(cross), 1e-18);
  }
  const double mid = lr_at(total / 2, 2 * (total / 2), 2e-5);
  EXPECT_LE(std::abs(mid - 0.5 * (lr_at(0, total - 1, 2e-5) + 0.0)), 1e-18);
}

TEST(Schedule, WarmupKnob) {
  EXPECT_EQ(lr_at(0, 100, 1.0, 10), 0.0);
  EXPECT_DOUBLE_EQ(lr_at(5, 100, 1.0, 10), 0.5);
  EXPECT_DOUBLE_EQ(lr_at(10, 100, 1.0, 10), 1.0);
  EXPECT_DOUBLE_EQ(lr_at(55, 100, 1.0, 10), 0.5);
  EXPECT_EQ(lr_at(100, 100, 1.0, 10), 0.0);
  EXPECT_THROW(lr_at(0, 10, 1.0, 10), Error);
}

TEST(Metrics, ArgmaxRows) {
  EXPECT_EQ(argmax_rows(Tensor::matrix({{0.2, 0.8}, {0.6, 0.4}, {0.5, 0.5}})),
            (std::vector<std::size_t>{1, 0, 0}));
}

class LearningSanity : public ::testing::TestWithParam<PoolerKind> {};

TEST_P(LearningSanity, SeparableCorpusIsLearned) {
  const auto corpus = separable_corpus();
  const auto texts = corpus.texts();
  const auto vocab = textprep::build_vocab(texts, 1000, 1);
  const auto start = std::chrono::steady_clock::now();
  Trainer trainer(desk_model_config(GetParam()), sanity_train_config(), vocab,
                  textprep::CleanRules::defaults(), corpus);
  double best = 0;
  while (!trainer.finished()) {
    best = std::max(best, trainer.run_epoch().train.f1);
  }
  const double seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  const auto& h = trainer.history();
  ASSERT_EQ(h.size(), 30u);
  EXPECT_GE(best, 0.95);
  EXPECT_LT(seconds, 120.0);
  for (std::size_t e = 1; e < 5; ++e) {
    EXPECT_LT(h[e].loss, h[e - 1].loss + 1e-9) << "epoch " << e + 1;
  }
  std::cout << "final train F1 " << h.back().train.f1 << ", " << seconds << " s\n";
}

INSTANTIATE_TEST_SUITE_P(Poolers, LearningSanity,
                         ::testing::Values(PoolerKind::kAttention, PoolerKind::kMean),
                         [](const auto& info) { return model::to_string(info.param); });

TEST(Trainer, ZeroEpochsReturnsInitializedModel) {
  const auto corpus = separable_corpus(16);
  const auto vocab = textprep::build_vocab(corpus.texts(), 100, 1);
  TrainConfig cfg = sanity_train_config();
  cfg.epochs = 0;
  const auto result = train(desk_model_config(PoolerKind::kMean), corpus, std::nullopt, cfg, vocab);
  EXPECT_TRUE(result.history.empty());
  EXPECT_EQ(result.checkpoint.epochs_completed, 0u);
  model::ModelConfig mc = desk_model_config(PoolerKind::kMean);
  mc.vocab_size = vocab.size();
  mc.dropout_p = cfg.dropout;
  model::Model fresh(mc);
  fresh.initialize(derive_seed(cfg.seed, {1}));
  const auto& params = result.checkpoint.params.params();
  ASSERT_EQ(params.size(), fresh.params().size());
  for (std::size_t i = 0; i < params.size(); ++i) {
    EXPECT_EQ(params[i].value, fresh.params().params()[i].value) << params[i].name;
  }
}

TEST(Trainer, SameSeedIsBitwiseReproducible) {
  const auto corpus = separable_corpus(24, 3);
  const auto vocab = textprep::build_vocab(corpus.texts(), 100, 1);
  TrainConfig cfg = sanity_train_config();
  cfg.epochs = 3;
  const auto eval = separable_corpus(10, 4);
  const auto a = train(desk_model_config(PoolerKind::kAttention), corpus, eval, cfg, vocab);
  const auto b = train(desk_model_config(PoolerKind::kAttention), corpus, eval, cfg, vocab);
  ASSERT_EQ(a.history.size(), 3u);
  for (std::size_t e = 0; e < 3; ++e) {
    EXPECT_EQ(a.history[e].loss, b.history[e].loss);
    EXPECT_EQ(a.history[e].eval->f1, b.history[e].eval->f1);
  }
  cfg.seed += 1;
  const auto c = train(desk_model_config(PoolerKind::kAttention), corpus, eval, cfg, vocab);
  EXPECT_NE(a.history[0].loss, c.history[0].loss);
}

TEST(Trainer, BalancesAndSizesSchedule) {
  dataset::LabeledCorpus corpus({"NOT", "HOF"});
  for (int i = 0; i < 10; ++i) corpus.add({std::to_string(i), "good film", 0});
  for (int i = 0; i < 4; ++i) corpus.add({std::to_string(10 + i), "bad1 film", 1});
  const auto vocab = textprep::build_vocab(corpus.texts(), 100, 1);
  TrainConfig cfg;
  cfg.epochs = 2;
  Trainer t(desk_model_config(PoolerKind::kMean), cfg, vocab, textprep::CleanRules::defaults(),
            corpus);
  EXPECT_EQ(t.train_corpus().class_counts(), (std::vector<std::size_t>{10, 10}));
  EXPECT_EQ(t.total_steps(), 2u * 3u);
  EXPECT_EQ(t.seq_len(), 128u);
  cfg.balance = false;
  Trainer u(desk_model_config(PoolerKind::kMean), cfg, vocab, textprep::CleanRules::defaults(),
            corpus);
  EXPECT_EQ(u.train_corpus().size(), 14u);
}

TEST(Evaluate, PredictProbaIndependentOfBatchSize) {
  const auto corpus = separable_corpus(20);
  const auto vocab = textprep::build_vocab(corpus.texts(), 100, 1);
  model::ModelConfig mc = desk_model_config(PoolerKind::kAttention);
  mc.vocab_size = vocab.size();
  model::Model m(mc);
  m.initialize(9);
  const auto texts = corpus.texts();
  const Tensor a = predict_proba(m, vocab, texts, 64, 1);
  const Tensor b = predict_proba(m, vocab, texts, 64, 7);
  ASSERT_EQ(a.shape(), b.shape());
  for (std::size_t i = 0; i < a.size(); ++i) EXPECT_NEAR(a[i], b[i], 1e-12);
  EXPECT_THROW(evaluate(m, vocab, dataset::LabeledCorpus({"NOT", "HOF"}), 64), Error);
}

}  // namespace
}  // namespace codemix::training
