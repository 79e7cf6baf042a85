#include <cmath>

#include <gtest/gtest.h>
#include <nlohmann/json.hpp>

#include "codemix/error.hpp"
#include "codemix/model/config.hpp"
#include "codemix/model/model.hpp"
#include "codemix/model/pooling.hpp"
#include "codemix/nn/grad_check.hpp"
#include "support/fixtures.hpp"

namespace codemix::model {
namespace {

using codemix::testing::random_batch;
using codemix::testing::random_prefix_mask;
using codemix::testing::random_tensor;
using textprep::TokenBatch;

ModelConfig toy_config(PoolerKind pooler) {
  ModelConfig cfg;
  cfg.vocab_size = 12;
  cfg.d_model = 8;
  cfg.n_layers = 2;
  cfg.n_heads = 2;
  cfg.d_ff = 16;
  cfg.max_seq_len = 8;
  cfg.pooler_kind = pooler;
  return cfg;
}

// Moves every parameter away from its structured init so gradient checks
// exercise all paths (nonzero pooler query, non-unit gammas).
void randomize(Model& m, std::uint64_t seed) {
  SplitMix64 rng(seed);
  for (auto& p : m.params().params()) {
    p.value = random_tensor(p.value.shape(), rng, 0.4);
    if (p.name.ends_with(".gamma")) {
      for (double& v : p.value.data()) v += 1.0;
    }
  }
}

// Mean cross-entropy written out directly so this test does not depend on
// the training module.
double mean_nll(const Tensor& probs, const std::vector<std::size_t>& labels) {
  double s = 0;
  for (std::size_t i = 0; i < labels.size(); ++i) s -= std::log(probs.at(i, labels[i]));
  return s / static_cast<double>(labels.size());
}

Tensor nll_dlogits(const Tensor& probs, const std::vector<std::size_t>& labels) {
  Tensor d = probs;
  for (std::size_t i = 0; i < labels.size(); ++i) d.at(i, labels[i]) -= 1.0;
  for (double& v : d.data()) v /= static_cast<double>(labels.size());
  return d;
}

TEST(Config, ValidationAndJson) {
  ModelConfig cfg;
  EXPECT_NO_THROW(cfg.validate());
  auto bad = cfg;
  bad.n_heads = 3;
  EXPECT_THROW(bad.validate(), Error);
  bad = cfg;
  bad.max_seq_len = 513;
  EXPECT_THROW(bad.validate(), Error);
  bad = cfg;
  bad.n_classes = 1;
  EXPECT_THROW(bad.validate(), Error);
  bad = cfg;
  bad.dropout_p = 1.0;
  EXPECT_THROW(bad.validate(), Error);
  cfg.pooler_kind = PoolerKind::kMean;
  cfg.d_model = 32;
  const nlohmann::json j = cfg;
  EXPECT_EQ(j.at("pooler_kind"), "mean");
  EXPECT_EQ(j.get<ModelConfig>(), cfg);
  EXPECT_THROW(parse_pooler_kind("max"), Error);
}

TEST(Model, ParameterShapesAndInit) {
  Model m(toy_config(PoolerKind::kAttention));
  m.initialize(3);
  const auto& s = m.params();
  EXPECT_EQ(s.value(s.require("embeddings.token")).shape(), (Tensor::Shape{12, 8}));
  EXPECT_EQ(s.value(s.require("pooler.query")).shape(), (Tensor::Shape{8}));
  EXPECT_EQ(s.value(s.require("pooler.proj")).shape(), (Tensor::Shape{8, 8}));
  EXPECT_EQ(s.value(s.require("classifier.weight")).shape(), (Tensor::Shape{8, 2}));
  for (double v : s.value(s.require("pooler.query")).data()) EXPECT_EQ(v, 0.0);
  for (double v : s.value(s.require("classifier.bias")).data()) EXPECT_EQ(v, 0.0);
  double sq = 0;
  const auto& emb = s.value(s.require("embeddings.token"));
  for (double v : emb.data()) sq += v * v;
  EXPECT_NEAR(std::sqrt(sq / emb.size()), 0.02, 0.006);
  Model mean(toy_config(PoolerKind::kMean));
  EXPECT_FALSE(mean.params().find("pooler.query").has_value());
}

TEST(Model, EncoderOutputShape) {
  ModelConfig cfg = toy_config(PoolerKind::kMean);
  Model m(cfg);
  m.initialize(1);
  SplitMix64 rng(4);
  const TokenBatch b = random_batch(2, 5, cfg.vocab_size, rng);
  EXPECT_EQ(m.encode(b, false, 0).shape(), (Tensor::Shape{2, 5, 8}));
  EXPECT_EQ(m.forward(b, false, 0).probs.shape(), (Tensor::Shape{2, 2}));
}

TEST(Model, OutOfRangeIdIsDataError) {
  Model m(toy_config(PoolerKind::kMean));
  m.initialize(1);
  TokenBatch b{1, 2, {2, 12}, {1, 1}};
  try {
    m.encode(b, false, 0);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kData);
  }
}

TEST(Model, BatchRowPermutationCommutes) {
  for (PoolerKind kind : {PoolerKind::kAttention, PoolerKind::kMean}) {
    Model m(toy_config(kind));
    randomize(m, 5);
    SplitMix64 rng(6);
    const TokenBatch b = random_batch(3, 6, 12, rng);
    TokenBatch p = b;
    const std::size_t perm[] = {2, 0, 1};
    for (std::size_t r = 0; r < 3; ++r) {
      for (std::size_t c = 0; c < 6; ++c) {
        p.ids[r * 6 + c] = b.ids[perm[r] * 6 + c];
        p.mask[r * 6 + c] = b.mask[perm[r] * 6 + c];
      }
    }
    const Tensor hb = m.encode(b, false, 0), hp = m.encode(p, false, 0);
    for (std::size_t r = 0; r < 3; ++r) {
      for (std::size_t i = 0; i < 6 * 8; ++i) {
        ASSERT_EQ(hp[r * 48 + i], hb[perm[r] * 48 + i]);
      }
    }
  }
}

TEST(Model, PadIdsDoNotLeakIntoLivePositions) {
  Model m(toy_config(PoolerKind::kAttention));
  randomize(m, 7);
  TokenBatch b{1, 6, {2, 5, 7, 0, 0, 0}, {1, 1, 1, 0, 0, 0}};
  const Tensor h1 = m.encode(b, false, 0);
  const Tensor p1 = m.forward(b, false, 0).probs;
  b.ids[4] = 9;
  b.ids[5] = 11;
  const Tensor h2 = m.encode(b, false, 0);
  for (std::size_t i = 0; i < 3 * 8; ++i) EXPECT_NEAR(h1[i], h2[i], 1e-12);
  const Tensor p2 = m.forward(b, false, 0).probs;
  for (std::size_t i = 0; i < p1.size(); ++i) EXPECT_NEAR(p1[i], p2[i], 1e-12);
}

TEST(Model, ForwardIsDeterministicPerSeed) {
  Model m(toy_config(PoolerKind::kAttention));
  randomize(m, 8);
  SplitMix64 rng(9);
  const TokenBatch b = random_batch(2, 7, 12, rng);
  EXPECT_EQ(m.forward(b, true, 42).logits, m.forward(b, true, 42).logits);
  EXPECT_NE(m.forward(b, true, 42).logits, m.forward(b, true, 43).logits);
  EXPECT_EQ(m.forward(b, false, 1).logits, m.forward(b, false, 2).logits);
}

TEST(Model, PoolIncludeClsSwitch) {
  ModelConfig cfg = toy_config(PoolerKind::kMean);
  cfg.pool_include_cls = false;
  Model m(cfg);
  randomize(m, 10);
  TokenBatch b{2, 3, {2, 5, 6, 2, 0, 0}, {1, 1, 1, 1, 0, 0}};
  ForwardCache cache;
  m.forward(b, false, 0, &cache);
  // Row 0 averages positions 1 and 2; row 1 has only CLS, which is kept.
  for (std::size_t j = 0; j < 8; ++j) {
    EXPECT_NEAR(cache.pooled.at(0, j),
                0.5 * (cache.hidden.at(0, 1, j) + cache.hidden.at(0, 2, j)), 1e-12);
    EXPECT_NEAR(cache.pooled.at(1, j), cache.hidden.at(1, 0, j), 1e-12);
  }
}

class EndToEndGrad : public ::testing::TestWithParam<PoolerKind> {};

TEST_P(EndToEndGrad, MatchesFiniteDifferences) {
  for (std::uint64_t seed = 1; seed <= 2; ++seed) {
    Model m(toy_config(GetParam()));
    randomize(m, seed);
    SplitMix64 rng(seed + 100);
    const TokenBatch b = random_batch(2, 4, 12, rng);
    const std::vector<std::size_t> labels = {0, 1};
    for (bool train : {false, true}) {
      auto loss = [&] { return mean_nll(m.forward(b, train, 77).probs, labels); };
      auto grads = [&] {
        ForwardCache cache;
        const auto out = m.forward(b, train, 77, &cache);
        m.backward(cache, nll_dlogits(out.probs, labels));
      };
      const auto report = nn::grad_check(m.params(), loss, grads);
      EXPECT_TRUE(report.passed()) << "train=" << train << "\n" << report.summary();
    }
  }
}

INSTANTIATE_TEST_SUITE_P(Poolers, EndToEndGrad,
                         ::testing::Values(PoolerKind::kAttention, PoolerKind::kMean),
                         [](const auto& info) { return to_string(info.param); });

Tensor identity(std::size_t d) {
  Tensor eye({d, d});
  for (std::size_t i = 0; i < d; ++i) eye.at(i, i) = 1.0;
  return eye;
}

TEST(AttentionPool, ZeroQueryIdentityProjectionIsMeanPool) {
  SplitMix64 rng(12);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t n = 1 + rng.below(4), len = 1 + rng.below(8), d = 1 + rng.below(16);
    const Tensor h = random_tensor({n, len, d}, rng, 3.0);
    const auto mask = random_prefix_mask(n, len, rng);
    const Tensor a = attention_pool(h, mask, Tensor({d}), identity(d), nullptr);
    const Tensor b = mean_pool(h, mask);
    for (std::size_t i = 0; i < a.size(); ++i) ASSERT_NEAR(a[i], b[i], 1e-9);
  }
}

TEST(AttentionPool, SingleLiveTokenIsThatToken) {
  SplitMix64 rng(13);
  const Tensor h = random_tensor({1, 3, 4}, rng);
  const std::uint8_t mask[] = {1, 0, 0};
  const Tensor o = attention_pool(h, mask, random_tensor({4}, rng), identity(4), nullptr);
  for (std::size_t j = 0; j < 4; ++j) EXPECT_NEAR(o[j], h.at(0, 0, j), 1e-15);
}

TEST(AttentionPool, HandSoftmaxExample) {
  const Tensor h({1, 2, 2}, std::vector<double>{1, 0, 0, 1});
  const std::uint8_t mask[] = {1, 1};
  const Tensor o = attention_pool(h, mask, Tensor::vector({1, 0}), identity(2), nullptr);
  EXPECT_NEAR(o[0], 0.7310585786300049, 1e-15);
  EXPECT_NEAR(o[1], 0.2689414213699951, 1e-15);
}

TEST(AttentionPool, AllMaskedRowIsNumericError) {
  const std::uint8_t mask[] = {0, 0};
  try {
    attention_pool(Tensor({1, 2, 2}), mask, Tensor({2}), identity(2), nullptr);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kNumeric);
  }
}

TEST(AttentionPool, GradientsMatchFiniteDifferences) {
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    SplitMix64 rng(seed);
    nn::ParamStore store;
    const auto h = store.add("hidden", random_tensor({2, 8, 16}, rng));
    const auto q = store.add("query", random_tensor({16}, rng, 0.3));
    const auto w = store.add("proj", random_tensor({16, 16}, rng, 0.3));
    const auto mask = random_prefix_mask(2, 8, rng);
    const Tensor up = random_tensor({2, 16}, rng);
    auto loss = [&] {
      const Tensor o = attention_pool(store.value(h), mask, store.value(q), store.value(w), nullptr);
      double s = 0;
      for (std::size_t i = 0; i < o.size(); ++i) s += o[i] * up[i];
      return s;
    };
    auto grads = [&] {
      AttentionPoolCache cache;
      attention_pool(store.value(h), mask, store.value(q), store.value(w), &cache);
      store.grad(h) += attention_pool_backward(store.value(h), mask, store.value(q),
                                               store.value(w), cache, up, store.grad(q),
                                               store.grad(w));
    };
    const auto report = nn::grad_check(store, loss, grads);
    EXPECT_TRUE(report.passed()) << report.summary();
  }
}

TEST(MeanPool, Examples) {
  const Tensor same({1, 3, 2}, std::vector<double>{4, -1, 4, -1, 4, -1});
  const std::uint8_t all[] = {1, 1, 1};
  EXPECT_EQ(mean_pool(same, all), Tensor::matrix({{4, -1}}));
  const Tensor h({1, 3, 2}, std::vector<double>{1, 3, 3, 5, 9, 9});
  const std::uint8_t one[] = {0, 1, 0};
  EXPECT_EQ(mean_pool(h, one), Tensor::matrix({{3, 5}}));
  const std::uint8_t two[] = {1, 1, 0};
  EXPECT_EQ(mean_pool(h, two), Tensor::matrix({{2, 4}}));
  const std::uint8_t none[] = {0, 0, 0};
  EXPECT_THROW(mean_pool(h, none), Error);
}

TEST(MeanPool, BackwardSpreadsEvenlyOverLiveTokens) {
  const std::uint8_t mask[] = {1, 1, 0, 0};
  const Tensor d = mean_pool_backward({1, 4, 1}, mask, Tensor::matrix({{6}}));
  EXPECT_EQ(d, Tensor({1, 4, 1}, std::vector<double>{3, 3, 0, 0}));
}

TEST(Classify, Examples) {
  const Tensor pooled = Tensor::matrix({{1, 2, 3}, {-1, 0, 5}});
  const Tensor zero_w({3, 4});
  const Tensor uniform = classify(pooled, zero_w, Tensor({4}), 0.5, false, 0, nullptr);
  for (double v : uniform.data()) EXPECT_DOUBLE_EQ(v, 0.25);
  const Tensor p = classify(pooled, Tensor({3, 2}), Tensor::vector({std::log(3.0), 0.0}), 0.5,
                            false, 0, nullptr);
  EXPECT_NEAR(p.at(0, 0), 0.75, 1e-15);
  EXPECT_NEAR(p.at(0, 1), 0.25, 1e-15);
  SplitMix64 rng(14);
  const Tensor w = random_tensor({3, 2}, rng), b = random_tensor({2}, rng);
  EXPECT_EQ(classify(pooled, w, b, 0.0, true, 5, nullptr),
            classify(pooled, w, b, 0.0, false, 5, nullptr));
}

TEST(Classify, RowsArePositiveAndSumToOne) {
  SplitMix64 rng(15);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t n = 1 + rng.below(5), d = 1 + rng.below(8), c = 2 + rng.below(3);
    const Tensor p = classify(random_tensor({n, d}, rng, 3.0), random_tensor({d, c}, rng),
                              random_tensor({c}, rng), 0.5, trial % 2 == 0, rng.next(), nullptr);
    for (std::size_t r = 0; r < n; ++r) {
      double sum = 0;
      for (std::size_t k = 0; k < c; ++k) {
        ASSERT_GT(p.at(r, k), 0.0);
        sum += p.at(r, k);
      }
      ASSERT_NEAR(sum, 1.0, 1e-12);
    }
  }
}

}  // namespace
}  // namespace codemix::model
