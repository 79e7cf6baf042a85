#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "codemix/dataset/corpus.hpp"
#include "codemix/model/config.hpp"
#include "codemix/nn/tensor.hpp"
#include "codemix/random.hpp"
#include "codemix/textprep/tokenizer.hpp"
#include "codemix/training/config.hpp"

namespace codemix::testing {

// 64 examples, 32 per class. Texts are 3-7 filler words; every class-1 text
// contains the token "bad1" and no class-0 text does.
dataset::LabeledCorpus separable_corpus(std::size_t n = 64, std::uint64_t seed = 7);

// Desk-scale model (2 layers, d_model 64) and the training recipe used for
// the learning-sanity checks.
model::ModelConfig desk_model_config(model::PoolerKind pooler);
training::TrainConfig sanity_train_config();

// Random strings mixing Latin, Tamil, digits, punctuation, symbols, emoji,
// whitespace, URLs, mentions and "www." fragments.
std::string adversarial_string(SplitMix64& rng);

nn::Tensor random_tensor(const nn::Tensor::Shape& shape, SplitMix64& rng, double scale = 1.0);

// Random batch with rows of random length in [1, len]; ids in [0, vocab).
textprep::TokenBatch random_batch(std::size_t batch, std::size_t len, std::size_t vocab,
                                  SplitMix64& rng);

std::vector<std::uint8_t> random_prefix_mask(std::size_t batch, std::size_t len,
                                             SplitMix64& rng);

std::string temp_path(const std::string& name);
void write_file(const std::string& path, const std::string& content);
std::string read_file(const std::string& path);

}  // namespace codemix::testing
