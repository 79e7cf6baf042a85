#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "codemix/nn/tensor.hpp"

namespace codemix::nn {

struct ParamId {
  std::size_t index = 0;
  friend bool operator==(ParamId, ParamId) = default;
};

struct Param {
  std::string name;
  Tensor value;
  Tensor grad;
};

// Named parameters with gradient slots, kept in registration order. Layers
// refer to entries by ParamId so the store can be copied or moved freely.
class ParamStore {
 public:
  ParamId add(std::string name, Tensor value);

  Param& at(ParamId id) { return params_.at(id.index); }
  const Param& at(ParamId id) const { return params_.at(id.index); }
  Tensor& value(ParamId id) { return at(id).value; }
  const Tensor& value(ParamId id) const { return at(id).value; }
  Tensor& grad(ParamId id) { return at(id).grad; }
  const Tensor& grad(ParamId id) const { return at(id).grad; }

  std::optional<ParamId> find(const std::string& name) const;
  ParamId require(const std::string& name) const;

  std::size_t size() const noexcept { return params_.size(); }
  std::size_t num_scalars() const noexcept;
  std::span<Param> params() noexcept { return params_; }
  std::span<const Param> params() const noexcept { return params_; }

  void zero_grad() noexcept;

 private:
  std::vector<Param> params_;
  std::unordered_map<std::string, std::size_t> index_;
};

}  // namespace codemix::nn
