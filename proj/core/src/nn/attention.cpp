#include "codemix/nn/attention.hpp"

#include <cmath>

#include "codemix/error.hpp"

namespace codemix::nn {

MultiHeadAttention MultiHeadAttention::create(ParamStore& store, const std::string& name,
                                              std::size_t d_model, std::size_t heads) {
  if (heads == 0 || d_model % heads != 0) {
    fail(ErrorKind::kConfig, "attention: d_model " + std::to_string(d_model) +
                                 " not divisible by " + std::to_string(heads) +
                                 " heads");
  }
  MultiHeadAttention mha;
  mha.query = Linear::create(store, name + ".query", d_model, d_model);
  mha.key = Linear::create(store, name + ".key", d_model, d_model);
  mha.value = Linear::create(store, name + ".value", d_model, d_model);
  mha.output = Linear::create(store, name + ".output", d_model, d_model);
  mha.heads = heads;
  mha.d_model = d_model;
  return mha;
}

Tensor MultiHeadAttention::forward(const ParamStore& store, const Tensor& x,
                                   Mask key_mask, Cache& cache) const {
  if (x.rank() != 3 || x.dim(2) != d_model) {
    fail(ErrorKind::kDimension, "attention: input " + shape_string(x.shape()));
  }
  const std::size_t n = x.dim(0);
  const std::size_t len = x.dim(1);
  if (key_mask.size() != n * len) {
    fail(ErrorKind::kDimension, "attention: mask does not match input");
  }
  const std::size_t dh = d_model / heads;
  const double scale = 1.0 / std::sqrt(static_cast<double>(dh));

  cache.x = x;
  cache.q = query.forward(store, x);
  cache.k = key.forward(store, x);
  cache.v = value.forward(store, x);
  cache.probs = Tensor({n, heads, len, len});
  cache.context = Tensor({n, len, d_model});

  Tensor scores({len, len});
  for (std::size_t b = 0; b < n; ++b) {
    for (std::size_t h = 0; h < heads; ++h) {
      const std::size_t off = h * dh;
      for (std::size_t i = 0; i < len; ++i) {
        const double* qi = &cache.q.at(b, i, off);
        for (std::size_t j = 0; j < len; ++j) {
          const double* kj = &cache.k.at(b, j, off);
          double s = 0.0;
          for (std::size_t c = 0; c < dh; ++c) s += qi[c] * kj[c];
          s *= scale;
          if (!key_mask[b * len + j]) s += kMaskBias;
          scores.at(i, j) = s;
        }
      }
      const Tensor p = softmax_rows(scores);
      double* pdst = &cache.probs[((b * heads + h) * len) * len];
      std::copy(p.data().begin(), p.data().end(), pdst);
      for (std::size_t i = 0; i < len; ++i) {
        double* ctx = &cache.context.at(b, i, off);
        for (std::size_t j = 0; j < len; ++j) {
          const double pij = p.at(i, j);
          const double* vj = &cache.v.at(b, j, off);
          for (std::size_t c = 0; c < dh; ++c) ctx[c] += pij * vj[c];
        }
      }
    }
  }
  return output.forward(store, cache.context);
}

Tensor MultiHeadAttention::backward(ParamStore& store, const Cache& cache,
                                    const Tensor& dy) const {
  const std::size_t n = cache.x.dim(0);
  const std::size_t len = cache.x.dim(1);
  const std::size_t dh = d_model / heads;
  const double scale = 1.0 / std::sqrt(static_cast<double>(dh));

  const Tensor dcontext = output.backward(store, cache.context, dy);
  Tensor dq(cache.q.shape());
  Tensor dk(cache.k.shape());
  Tensor dv(cache.v.shape());
  Tensor p({len, len});
  Tensor dp({len, len});

  for (std::size_t b = 0; b < n; ++b) {
    for (std::size_t h = 0; h < heads; ++h) {
      const std::size_t off = h * dh;
      const double* psrc = &cache.probs[((b * heads + h) * len) * len];
      std::copy(psrc, psrc + len * len, p.data().begin());
      for (std::size_t i = 0; i < len; ++i) {
        const double* dctx = &dcontext.at(b, i, off);
        for (std::size_t j = 0; j < len; ++j) {
          const double* vj = &cache.v.at(b, j, off);
          double* dvj = &dv.at(b, j, off);
          double acc = 0.0;
          for (std::size_t c = 0; c < dh; ++c) {
            acc += dctx[c] * vj[c];
            dvj[c] += p.at(i, j) * dctx[c];
          }
          dp.at(i, j) = acc;
        }
      }
      // The mask bias is a constant, so it drops out of the score gradient.
      const Tensor ds = softmax_rows_backward(p, dp);
      for (std::size_t i = 0; i < len; ++i) {
        const double* qi = &cache.q.at(b, i, off);
        double* dqi = &dq.at(b, i, off);
        for (std::size_t j = 0; j < len; ++j) {
          const double g = ds.at(i, j) * scale;
          if (g == 0.0) continue;
          const double* kj = &cache.k.at(b, j, off);
          double* dkj = &dk.at(b, j, off);
          for (std::size_t c = 0; c < dh; ++c) {
            dqi[c] += g * kj[c];
            dkj[c] += g * qi[c];
          }
        }
      }
    }
  }

  Tensor dx = query.backward(store, cache.x, dq);
  dx += key.backward(store, cache.x, dk);
  dx += value.backward(store, cache.x, dv);
  return dx;
}

}  // namespace codemix::nn
