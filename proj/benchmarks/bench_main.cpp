#include <benchmark/benchmark.h>

#include "codemix/model/model.hpp"
#include "codemix/random.hpp"
#include "codemix/textprep/clean.hpp"
#include "codemix/textprep/tokenizer.hpp"
#include "codemix/textprep/vocab.hpp"

namespace {

using namespace codemix;

const char* const kSample =
    "Vera level trailer @vijayfan 😍😍 https://t.co/abc thalaivar mass!!! "
    "padam semma hit, this is the best movie of the year பாட்டு அருமை";

void BM_CleanText(benchmark::State& state) {
  const auto rules = textprep::CleanRules::defaults();
  for (auto _ : state) benchmark::DoNotOptimize(textprep::clean_text(kSample, rules));
}
BENCHMARK(BM_CleanText);

void BM_Tokenize(benchmark::State& state) {
  const auto rules = textprep::CleanRules::defaults();
  const std::string cleaned = textprep::clean_text(kSample, rules);
  const std::vector<std::string> corpus = {cleaned, "vera level padam", "semma mass"};
  const auto vocab = textprep::build_vocab(corpus, 200, 2);
  for (auto _ : state) benchmark::DoNotOptimize(textprep::tokenize(cleaned, vocab, 128));
}
BENCHMARK(BM_Tokenize);

textprep::TokenBatch make_batch(std::size_t batch, std::size_t len, std::size_t vocab) {
  SplitMix64 rng(1);
  textprep::TokenBatch b{batch, len, {}, {}};
  for (std::size_t r = 0; r < batch; ++r) {
    for (std::size_t c = 0; c < len; ++c) {
      b.ids.push_back(c == 0 ? textprep::Vocab::kCls
                             : static_cast<textprep::TokenId>(4 + rng.below(vocab - 4)));
      b.mask.push_back(1);
    }
  }
  return b;
}

model::ModelConfig desk_config(model::PoolerKind kind) {
  model::ModelConfig cfg;
  cfg.vocab_size = 500;
  cfg.pooler_kind = kind;
  return cfg;
}

void BM_ForwardEval(benchmark::State& state) {
  model::Model m(desk_config(model::PoolerKind::kAttention));
  m.initialize(1);
  const auto batch = make_batch(8, static_cast<std::size_t>(state.range(0)), 500);
  for (auto _ : state) benchmark::DoNotOptimize(m.forward(batch, false, 0));
}
BENCHMARK(BM_ForwardEval)->Arg(16)->Arg(64)->Arg(128)->Unit(benchmark::kMillisecond);

void BM_ForwardBackward(benchmark::State& state) {
  model::Model m(desk_config(static_cast<model::PoolerKind>(state.range(1))));
  m.initialize(1);
  const auto batch = make_batch(8, static_cast<std::size_t>(state.range(0)), 500);
  for (auto _ : state) {
    model::ForwardCache cache;
    const auto out = m.forward(batch, true, 7, &cache);
    m.backward(cache, out.probs);
  }
}
BENCHMARK(BM_ForwardBackward)
    ->Args({16, 0})
    ->Args({64, 0})
    ->Args({64, 1})
    ->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
