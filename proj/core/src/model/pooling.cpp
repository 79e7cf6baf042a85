#include "codemix/model/pooling.hpp"

#include <string>

#include "codemix/error.hpp"

namespace codemix::model {
namespace {

void check_hidden(const Tensor& hidden, Mask mask, const char* what) {
  if (hidden.rank() != 3) {
    fail(ErrorKind::kDimension, std::string(what) + ": hidden states must be 3-D");
  }
  if (mask.size() != hidden.dim(0) * hidden.dim(1)) {
    fail(ErrorKind::kDimension, std::string(what) + ": mask does not match hidden states");
  }
}

}  // namespace

Tensor attention_pool(const Tensor& hidden, Mask mask, const Tensor& query,
                      const Tensor& proj, AttentionPoolCache* cache) {
  check_hidden(hidden, mask, "attention_pool");
  const std::size_t n = hidden.dim(0);
  const std::size_t len = hidden.dim(1);
  const std::size_t d = hidden.dim(2);
  if (query.size() != d || proj.rank() != 2 || proj.dim(0) != d) {
    fail(ErrorKind::kDimension, "attention_pool: parameter shapes do not match width");
  }

  Tensor scores({n, len});
  for (std::size_t b = 0; b < n; ++b) {
    for (std::size_t i = 0; i < len; ++i) {
      const double* h = &hidden.at(b, i, 0);
      double s = 0.0;
      for (std::size_t c = 0; c < d; ++c) s += query[c] * h[c];
      scores.at(b, i) = s;
    }
  }
  Tensor weights = nn::softmax_rows(scores, mask);
  Tensor context({n, d});
  for (std::size_t b = 0; b < n; ++b) {
    double* ctx = context.row(b);
    for (std::size_t i = 0; i < len; ++i) {
      const double a = weights.at(b, i);
      if (a == 0.0) continue;
      const double* h = &hidden.at(b, i, 0);
      for (std::size_t c = 0; c < d; ++c) ctx[c] += a * h[c];
    }
  }
  Tensor pooled = nn::linear(context, proj, nullptr);
  if (cache) {
    cache->weights = std::move(weights);
    cache->context = std::move(context);
  }
  return pooled;
}

Tensor attention_pool_backward(const Tensor& hidden, Mask mask, const Tensor& query,
                               const Tensor& proj, const AttentionPoolCache& cache,
                               const Tensor& dpooled, Tensor& dquery, Tensor& dproj) {
  const std::size_t n = hidden.dim(0);
  const std::size_t len = hidden.dim(1);
  const std::size_t d = hidden.dim(2);

  const Tensor dcontext = nn::linear_backward(cache.context, proj, dpooled, dproj, nullptr);
  Tensor dweights({n, len});
  Tensor dhidden(hidden.shape());
  for (std::size_t b = 0; b < n; ++b) {
    const double* dctx = dcontext.row(b);
    for (std::size_t i = 0; i < len; ++i) {
      const double* h = &hidden.at(b, i, 0);
      double* dh = &dhidden.at(b, i, 0);
      const double a = cache.weights.at(b, i);
      double acc = 0.0;
      for (std::size_t c = 0; c < d; ++c) {
        acc += dctx[c] * h[c];
        dh[c] += a * dctx[c];
      }
      dweights.at(b, i) = acc;
    }
  }
  const Tensor dscores = nn::softmax_rows_backward(cache.weights, dweights, mask);
  for (std::size_t b = 0; b < n; ++b) {
    for (std::size_t i = 0; i < len; ++i) {
      const double g = dscores.at(b, i);
      if (g == 0.0) continue;
      const double* h = &hidden.at(b, i, 0);
      double* dh = &dhidden.at(b, i, 0);
      for (std::size_t c = 0; c < d; ++c) {
        dquery[c] += g * h[c];
        dh[c] += g * query[c];
      }
    }
  }
  return dhidden;
}

Tensor mean_pool(const Tensor& hidden, Mask mask) {
  check_hidden(hidden, mask, "mean_pool");
  const std::size_t n = hidden.dim(0);
  const std::size_t len = hidden.dim(1);
  const std::size_t d = hidden.dim(2);
  Tensor pooled({n, d});
  for (std::size_t b = 0; b < n; ++b) {
    std::size_t live = 0;
    double* out = pooled.row(b);
    for (std::size_t i = 0; i < len; ++i) {
      if (!mask[b * len + i]) continue;
      ++live;
      const double* h = &hidden.at(b, i, 0);
      for (std::size_t c = 0; c < d; ++c) out[c] += h[c];
    }
    if (live == 0) {
      fail(ErrorKind::kNumeric, "mean_pool: row " + std::to_string(b) + " has no live token");
    }
    for (std::size_t c = 0; c < d; ++c) out[c] /= static_cast<double>(live);
  }
  return pooled;
}

Tensor mean_pool_backward(const Tensor::Shape& hidden_shape, Mask mask,
                          const Tensor& dpooled) {
  const std::size_t n = hidden_shape.at(0);
  const std::size_t len = hidden_shape.at(1);
  const std::size_t d = hidden_shape.at(2);
  Tensor dhidden(hidden_shape);
  for (std::size_t b = 0; b < n; ++b) {
    std::size_t live = 0;
    for (std::size_t i = 0; i < len; ++i) live += mask[b * len + i] ? 1 : 0;
    const double inv = 1.0 / static_cast<double>(live);
    const double* g = dpooled.row(b);
    for (std::size_t i = 0; i < len; ++i) {
      if (!mask[b * len + i]) continue;
      double* dh = &dhidden.at(b, i, 0);
      for (std::size_t c = 0; c < d; ++c) dh[c] = g[c] * inv;
    }
  }
  return dhidden;
}

Tensor classify(const Tensor& pooled, const Tensor& weight, const Tensor& bias,
                double dropout_p, bool train, std::uint64_t seed, ClassifyCache* cache) {
  ClassifyCache local;
  ClassifyCache& c = cache ? *cache : local;
  c.input = nn::dropout(pooled, dropout_p, train, seed, &c.dropout);
  c.logits = nn::linear(c.input, weight, &bias);
  c.probs = nn::softmax_rows(c.logits);
  return c.probs;
}

Tensor classify_backward(const ClassifyCache& cache, const Tensor& weight,
                         const Tensor& dlogits, Tensor& dweight, Tensor& dbias) {
  const Tensor dinput = nn::linear_backward(cache.input, weight, dlogits, dweight, &dbias);
  return nn::dropout_backward(cache.dropout, dinput);
}

}  // namespace codemix::model
