#include "codemix/training/adamw.hpp"

#include <cmath>

#include "codemix/error.hpp"

namespace codemix::training {

OptimizerState OptimizerState::zeros_like(const nn::ParamStore& params) {
  OptimizerState state;
  for (const auto& p : params.params()) {
    state.m.emplace_back(p.value.shape());
    state.v.emplace_back(p.value.shape());
  }
  return state;
}

void adamw_step(nn::ParamStore& params, OptimizerState& state, double lr,
                const TrainConfig& cfg) {
  auto all = params.params();
  if (state.m.size() != all.size() || state.v.size() != all.size()) {
    fail(ErrorKind::kDimension, "adamw_step: optimizer state does not match parameters");
  }
  for (const auto& p : all) {
    if (!p.grad.all_finite()) {
      fail(ErrorKind::kNumeric, "adamw_step: non-finite gradient in '" + p.name + "'");
    }
  }

  ++state.step;
  const double t = static_cast<double>(state.step);
  const double bias1 = 1.0 - std::pow(cfg.beta1, t);
  const double bias2 = 1.0 - std::pow(cfg.beta2, t);
  for (std::size_t i = 0; i < all.size(); ++i) {
    auto& p = all[i];
    auto& m = state.m[i];
    auto& v = state.v[i];
    for (std::size_t j = 0; j < p.value.size(); ++j) {
      const double g = p.grad[j];
      m[j] = cfg.beta1 * m[j] + (1.0 - cfg.beta1) * g;
      v[j] = cfg.beta2 * v[j] + (1.0 - cfg.beta2) * g * g;
      const double m_hat = m[j] / bias1;
      const double v_hat = v[j] / bias2;
      const double theta = p.value[j];
      p.value[j] = theta - lr * m_hat / (std::sqrt(v_hat) + cfg.adam_eps) -
                   lr * cfg.weight_decay * theta;
    }
    p.grad.fill(0.0);
  }
}

double clip_grad_norm(nn::ParamStore& params, double max_norm) {
  double sq = 0.0;
  for (const auto& p : params.params()) {
    for (const double g : p.grad.data()) sq += g * g;
  }
  const double norm = std::sqrt(sq);
  if (max_norm > 0.0 && norm > max_norm) {
    const double scale = max_norm / norm;
    for (auto& p : params.params()) {
      for (auto& g : p.grad.data()) g *= scale;
    }
  }
  return norm;
}

}  // namespace codemix::training
