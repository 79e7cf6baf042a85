#include "codemix/dataset/sampling.hpp"

#include <algorithm>
#include <numeric>
#include <span>

#include "codemix/error.hpp"
#include "codemix/random.hpp"

namespace codemix::dataset {

BalanceMode parse_balance_mode(const std::string& name) {
  if (name == "oversample") return BalanceMode::kOversample;
  if (name == "undersample") return BalanceMode::kUndersample;
  fail(ErrorKind::kConfig, "unknown balance mode '" + name + "'");
}

std::string to_string(BalanceMode mode) {
  return mode == BalanceMode::kOversample ? "oversample" : "undersample";
}

LabeledCorpus uniform_sample(const LabeledCorpus& corpus, std::uint64_t seed,
                             BalanceMode mode) {
  const auto& counts = corpus.class_counts();
  if (counts.empty()) fail(ErrorKind::kData, "uniform_sample: corpus has no classes");
  for (std::size_t k = 0; k < counts.size(); ++k) {
    if (counts[k] == 0) {
      fail(ErrorKind::kData, "uniform_sample: class '" + corpus.label_names()[k] +
                                 "' has no examples");
    }
  }

  std::vector<std::vector<std::size_t>> by_class(counts.size());
  for (std::size_t i = 0; i < corpus.size(); ++i) {
    by_class[corpus[i].label].push_back(i);
  }

  SplitMix64 rng(seed);
  std::vector<std::size_t> picked;
  if (mode == BalanceMode::kOversample) {
    const std::size_t target = *std::max_element(counts.begin(), counts.end());
    picked.resize(corpus.size());
    std::iota(picked.begin(), picked.end(), std::size_t{0});
    for (const auto& members : by_class) {
      for (std::size_t n = members.size(); n < target; ++n) {
        picked.push_back(members[rng.below(members.size())]);
      }
    }
  } else {
    const std::size_t target = *std::min_element(counts.begin(), counts.end());
    for (auto members : by_class) {
      shuffle(std::span(members), rng);
      members.resize(target);
      std::sort(members.begin(), members.end());
      picked.insert(picked.end(), members.begin(), members.end());
    }
  }
  shuffle(std::span(picked), rng);

  LabeledCorpus out(corpus.label_names());
  for (const auto i : picked) out.add(corpus[i]);
  return out;
}

std::vector<Batch> batches(const LabeledCorpus& corpus, std::size_t batch_size,
                           std::uint64_t shuffle_seed) {
  if (batch_size == 0) fail(ErrorKind::kConfig, "batches: batch_size must be >= 1");
  std::vector<std::size_t> order(corpus.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  SplitMix64 rng(shuffle_seed);
  shuffle(std::span(order), rng);

  std::vector<Batch> out;
  for (std::size_t start = 0; start < order.size(); start += batch_size) {
    const std::size_t end = std::min(order.size(), start + batch_size);
    Batch b;
    for (std::size_t i = start; i < end; ++i) {
      const auto& e = corpus[order[i]];
      b.indices.push_back(order[i]);
      b.texts.push_back(e.text);
      b.labels.push_back(e.label);
    }
    out.push_back(std::move(b));
  }
  return out;
}

}  // namespace codemix::dataset
