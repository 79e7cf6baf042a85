#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>

#include "codemix/nn/ops.hpp"
#include "codemix/nn/param_store.hpp"

namespace codemix::nn {

// Layers bind ParamIds into a store; values are zero until an initializer
// runs (see model::initialize_params).
struct Linear {
  ParamId weight;
  std::optional<ParamId> bias;

  static Linear create(ParamStore& store, const std::string& name, std::size_t d_in,
                       std::size_t d_out, bool with_bias = true);

  Tensor forward(const ParamStore& store, const Tensor& x) const;
  Tensor backward(ParamStore& store, const Tensor& x, const Tensor& dy) const;
};

struct LayerNorm {
  ParamId gamma;
  ParamId beta;
  double eps = kLayerNormEps;

  static LayerNorm create(ParamStore& store, const std::string& name, std::size_t d,
                          double eps = kLayerNormEps);

  Tensor forward(const ParamStore& store, const Tensor& x, LayerNormCache& cache) const;
  Tensor backward(ParamStore& store, const LayerNormCache& cache, const Tensor& dy) const;
};

struct Embedding {
  ParamId table;

  static Embedding create(ParamStore& store, const std::string& name, std::size_t rows,
                          std::size_t d);

  Tensor forward(const ParamStore& store, std::span<const std::int32_t> ids) const;
  void backward(ParamStore& store, std::span<const std::int32_t> ids, const Tensor& dy) const;
};

}  // namespace codemix::nn
