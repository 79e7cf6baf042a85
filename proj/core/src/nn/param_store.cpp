#include "codemix/nn/param_store.hpp"

#include "codemix/error.hpp"

namespace codemix::nn {

ParamId ParamStore::add(std::string name, Tensor value) {
  if (index_.contains(name)) {
    fail(ErrorKind::kConfig, "param store: duplicate parameter '" + name + "'");
  }
  const ParamId id{params_.size()};
  index_.emplace(name, id.index);
  Tensor grad(value.shape());
  params_.push_back(Param{std::move(name), std::move(value), std::move(grad)});
  return id;
}

std::optional<ParamId> ParamStore::find(const std::string& name) const {
  const auto it = index_.find(name);
  if (it == index_.end()) return std::nullopt;
  return ParamId{it->second};
}

ParamId ParamStore::require(const std::string& name) const {
  if (const auto id = find(name)) return *id;
  fail(ErrorKind::kData, "param store: no parameter named '" + name + "'");
}

std::size_t ParamStore::num_scalars() const noexcept {
  std::size_t n = 0;
  for (const auto& p : params_) n += p.value.size();
  return n;
}

void ParamStore::zero_grad() noexcept {
  for (auto& p : params_) p.grad.fill(0.0);
}

}  // namespace codemix::nn
