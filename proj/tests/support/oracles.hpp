#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "codemix/nn/tensor.hpp"

// Reference computations kept independent of the library code paths they
// check.
namespace codemix::testing {

struct PrfOracle {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
};

// Direct per-class counting over the raw (pred, label) pairs; no confusion
// matrix.
PrfOracle weighted_prf_oracle(std::span<const std::size_t> preds,
                              std::span<const std::size_t> labels, std::size_t n_classes);

// Central-difference gradient of f at x (all coordinates).
std::vector<double> numeric_gradient(const std::function<double(const std::vector<double>&)>& f,
                                     std::vector<double> x, double h = 1e-5);

// Top-k vocab entries by brute force: enumerate candidates, count each one
// by rescanning the corpus, then sort by (count desc, bytes asc).
std::vector<std::string> vocab_ranking_oracle(const std::vector<std::string>& corpus,
                                              std::size_t min_freq, std::size_t k);

}  // namespace codemix::testing
