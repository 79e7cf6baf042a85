#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "codemix/dataset/corpus.hpp"

namespace codemix::dataset {

enum class BalanceMode { kOversample, kUndersample };

BalanceMode parse_balance_mode(const std::string& name);
std::string to_string(BalanceMode mode);

// Equalizes class counts. Oversampling keeps every original example and draws
// each minority class with replacement up to the majority count; the merged
// list is then shuffled with the same SplitMix64 stream. Undersampling keeps a
// random subset of each class of the minority size. Every class needs at
// least one example.
LabeledCorpus uniform_sample(const LabeledCorpus& corpus, std::uint64_t seed,
                             BalanceMode mode = BalanceMode::kOversample);

struct Batch {
  std::vector<std::size_t> indices;
  std::vector<std::string> texts;
  std::vector<std::size_t> labels;
};

// One epoch: seeded Fisher-Yates permutation, contiguous chunks, final
// partial batch kept.
std::vector<Batch> batches(const LabeledCorpus& corpus, std::size_t batch_size,
                           std::uint64_t shuffle_seed);

}  // namespace codemix::dataset
