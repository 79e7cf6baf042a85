#include "codemix/nn/layers.hpp"

namespace codemix::nn {

Linear Linear::create(ParamStore& store, const std::string& name, std::size_t d_in,
                      std::size_t d_out, bool with_bias) {
  Linear layer;
  layer.weight = store.add(name + ".weight", Tensor({d_in, d_out}));
  if (with_bias) layer.bias = store.add(name + ".bias", Tensor({d_out}));
  return layer;
}

Tensor Linear::forward(const ParamStore& store, const Tensor& x) const {
  return linear(x, store.value(weight), bias ? &store.value(*bias) : nullptr);
}

Tensor Linear::backward(ParamStore& store, const Tensor& x, const Tensor& dy) const {
  return linear_backward(x, store.value(weight), dy, store.grad(weight),
                         bias ? &store.grad(*bias) : nullptr);
}

LayerNorm LayerNorm::create(ParamStore& store, const std::string& name, std::size_t d,
                            double eps) {
  LayerNorm layer;
  layer.gamma = store.add(name + ".gamma", Tensor({d}, 1.0));
  layer.beta = store.add(name + ".beta", Tensor({d}));
  layer.eps = eps;
  return layer;
}

Tensor LayerNorm::forward(const ParamStore& store, const Tensor& x,
                          LayerNormCache& cache) const {
  return layer_norm(x, store.value(gamma), store.value(beta), eps, &cache);
}

Tensor LayerNorm::backward(ParamStore& store, const LayerNormCache& cache,
                           const Tensor& dy) const {
  return layer_norm_backward(cache, store.value(gamma), dy, store.grad(gamma),
                             store.grad(beta));
}

Embedding Embedding::create(ParamStore& store, const std::string& name, std::size_t rows,
                            std::size_t d) {
  return Embedding{store.add(name, Tensor({rows, d}))};
}

Tensor Embedding::forward(const ParamStore& store, std::span<const std::int32_t> ids) const {
  return embedding_lookup(ids, store.value(table));
}

void Embedding::backward(ParamStore& store, std::span<const std::int32_t> ids,
                         const Tensor& dy) const {
  embedding_backward(ids, dy, store.grad(table));
}

}  // namespace codemix::nn
