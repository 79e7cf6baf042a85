#include "codemix/nn/ops.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "codemix/error.hpp"
#include "codemix/random.hpp"

namespace codemix::nn {
namespace {

constexpr double kGeluCoeff = 0.044715;
const double kSqrt2OverPi = std::sqrt(2.0 / std::numbers::pi);

void check_linear_shapes(const Tensor& x, const Tensor& weight, const Tensor* bias) {
  if (weight.rank() != 2 || x.cols() != weight.dim(0)) {
    fail(ErrorKind::kDimension, "linear: input " + shape_string(x.shape()) +
                                    " incompatible with weight " +
                                    shape_string(weight.shape()));
  }
  if (bias && (bias->rank() != 1 || bias->dim(0) != weight.dim(1))) {
    fail(ErrorKind::kDimension, "linear: bias " + shape_string(bias->shape()) +
                                    " incompatible with weight " +
                                    shape_string(weight.shape()));
  }
}

void check_mask(const Tensor& x, Mask mask, const char* what) {
  if (!mask.empty() && mask.size() != x.size()) {
    fail(ErrorKind::kDimension, std::string(what) + ": mask size " +
                                    std::to_string(mask.size()) + " vs tensor " +
                                    shape_string(x.shape()));
  }
}

}  // namespace

Tensor linear(const Tensor& x, const Tensor& weight, const Tensor* bias) {
  check_linear_shapes(x, weight, bias);
  const std::size_t n = x.rows();
  const std::size_t d_in = weight.dim(0);
  const std::size_t d_out = weight.dim(1);
  Tensor::Shape shape = x.shape();
  shape.back() = d_out;
  Tensor y(shape);
  for (std::size_t i = 0; i < n; ++i) {
    double* yr = y.row(i);
    if (bias) std::copy_n(bias->data().data(), d_out, yr);
    const double* xr = x.row(i);
    for (std::size_t k = 0; k < d_in; ++k) {
      const double xv = xr[k];
      const double* wr = weight.row(k);
      for (std::size_t j = 0; j < d_out; ++j) yr[j] += xv * wr[j];
    }
  }
  return y;
}

Tensor linear_backward(const Tensor& x, const Tensor& weight, const Tensor& dy,
                       Tensor& dweight, Tensor* dbias) {
  require_same_shape(weight, dweight, "linear backward dW");
  const std::size_t n = x.rows();
  const std::size_t d_in = weight.dim(0);
  const std::size_t d_out = weight.dim(1);
  if (dy.rows() != n || dy.cols() != d_out) {
    fail(ErrorKind::kDimension, "linear backward: upstream " + shape_string(dy.shape()));
  }
  Tensor dx(x.shape());
  for (std::size_t i = 0; i < n; ++i) {
    const double* xr = x.row(i);
    const double* gr = dy.row(i);
    double* dxr = dx.row(i);
    for (std::size_t k = 0; k < d_in; ++k) {
      const double* wr = weight.row(k);
      double* dwr = dweight.row(k);
      double acc = 0.0;
      for (std::size_t j = 0; j < d_out; ++j) {
        dwr[j] += xr[k] * gr[j];
        acc += gr[j] * wr[j];
      }
      dxr[k] = acc;
    }
    if (dbias) {
      for (std::size_t j = 0; j < d_out; ++j) (*dbias)[j] += gr[j];
    }
  }
  return dx;
}

Tensor softmax_rows(const Tensor& x, Mask mask) {
  check_mask(x, mask, "softmax_rows");
  const std::size_t m = x.cols();
  Tensor y(x.shape());
  for (std::size_t r = 0; r < x.rows(); ++r) {
    const double* xr = x.row(r);
    double* yr = y.row(r);
    auto live = [&](std::size_t j) { return mask.empty() || mask[r * m + j] != 0; };
    double max = -INFINITY;
    for (std::size_t j = 0; j < m; ++j) {
      if (live(j)) max = std::max(max, xr[j]);
    }
    if (max == -INFINITY) {
      fail(ErrorKind::kNumeric, "softmax_rows: row " + std::to_string(r) +
                                    " has no live entry");
    }
    double sum = 0.0;
    for (std::size_t j = 0; j < m; ++j) {
      yr[j] = live(j) ? std::exp(xr[j] - max) : 0.0;
      sum += yr[j];
    }
    for (std::size_t j = 0; j < m; ++j) yr[j] /= sum;
  }
  return y;
}

Tensor softmax_rows_backward(const Tensor& y, const Tensor& dy, Mask mask) {
  require_same_shape(y, dy, "softmax_rows backward");
  check_mask(y, mask, "softmax_rows backward");
  const std::size_t m = y.cols();
  Tensor dx(y.shape());
  for (std::size_t r = 0; r < y.rows(); ++r) {
    const double* yr = y.row(r);
    const double* gr = dy.row(r);
    double dot = 0.0;
    for (std::size_t j = 0; j < m; ++j) dot += yr[j] * gr[j];
    double* dxr = dx.row(r);
    for (std::size_t j = 0; j < m; ++j) {
      const bool live = mask.empty() || mask[r * m + j] != 0;
      dxr[j] = live ? yr[j] * (gr[j] - dot) : 0.0;
    }
  }
  return dx;
}

Tensor layer_norm(const Tensor& x, const Tensor& gamma, const Tensor& beta,
                  double eps, LayerNormCache* cache) {
  const std::size_t d = x.cols();
  if (d == 0 || x.empty()) fail(ErrorKind::kDimension, "layer_norm: zero width");
  if (gamma.size() != d || beta.size() != d) {
    fail(ErrorKind::kDimension, "layer_norm: gamma/beta width mismatch");
  }
  Tensor y(x.shape());
  Tensor normalized(x.shape());
  std::vector<double> inv_std(x.rows());
  for (std::size_t r = 0; r < x.rows(); ++r) {
    const double* xr = x.row(r);
    double mean = 0.0;
    for (std::size_t j = 0; j < d; ++j) mean += xr[j];
    mean /= static_cast<double>(d);
    double var = 0.0;
    for (std::size_t j = 0; j < d; ++j) var += (xr[j] - mean) * (xr[j] - mean);
    var /= static_cast<double>(d);
    const double is = 1.0 / std::sqrt(var + eps);
    inv_std[r] = is;
    double* nr = normalized.row(r);
    double* yr = y.row(r);
    for (std::size_t j = 0; j < d; ++j) {
      nr[j] = (xr[j] - mean) * is;
      yr[j] = gamma[j] * nr[j] + beta[j];
    }
  }
  if (cache) {
    cache->normalized = std::move(normalized);
    cache->inv_std = std::move(inv_std);
  }
  return y;
}

Tensor layer_norm_backward(const LayerNormCache& cache, const Tensor& gamma,
                           const Tensor& dy, Tensor& dgamma, Tensor& dbeta) {
  require_same_shape(cache.normalized, dy, "layer_norm backward");
  const std::size_t d = dy.cols();
  const double inv_d = 1.0 / static_cast<double>(d);
  Tensor dx(dy.shape());
  std::vector<double> dxhat(d);
  for (std::size_t r = 0; r < dy.rows(); ++r) {
    const double* nr = cache.normalized.row(r);
    const double* gr = dy.row(r);
    double mean_g = 0.0;
    double mean_gn = 0.0;
    for (std::size_t j = 0; j < d; ++j) {
      dgamma[j] += gr[j] * nr[j];
      dbeta[j] += gr[j];
      dxhat[j] = gr[j] * gamma[j];
      mean_g += dxhat[j];
      mean_gn += dxhat[j] * nr[j];
    }
    mean_g *= inv_d;
    mean_gn *= inv_d;
    double* dxr = dx.row(r);
    for (std::size_t j = 0; j < d; ++j) {
      dxr[j] = cache.inv_std[r] * (dxhat[j] - mean_g - nr[j] * mean_gn);
    }
  }
  return dx;
}

Tensor gelu(const Tensor& x) {
  Tensor y(x.shape());
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double v = x[i];
    y[i] = 0.5 * v * (1.0 + std::tanh(kSqrt2OverPi * (v + kGeluCoeff * v * v * v)));
  }
  return y;
}

Tensor gelu_backward(const Tensor& x, const Tensor& dy) {
  require_same_shape(x, dy, "gelu backward");
  Tensor dx(x.shape());
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double v = x[i];
    const double t = std::tanh(kSqrt2OverPi * (v + kGeluCoeff * v * v * v));
    const double dinner = kSqrt2OverPi * (1.0 + 3.0 * kGeluCoeff * v * v);
    dx[i] = dy[i] * (0.5 * (1.0 + t) + 0.5 * v * (1.0 - t * t) * dinner);
  }
  return dx;
}

Tensor embedding_lookup(std::span<const std::int32_t> ids, const Tensor& table) {
  if (table.rank() != 2) fail(ErrorKind::kDimension, "embedding: table must be 2-D");
  const std::size_t vocab = table.dim(0);
  const std::size_t d = table.dim(1);
  Tensor out({ids.size(), d});
  for (std::size_t i = 0; i < ids.size(); ++i) {
    if (ids[i] < 0 || static_cast<std::size_t>(ids[i]) >= vocab) {
      fail(ErrorKind::kData, "embedding: id " + std::to_string(ids[i]) +
                                 " outside table of " + std::to_string(vocab));
    }
    std::copy_n(table.row(static_cast<std::size_t>(ids[i])), d, out.row(i));
  }
  return out;
}

void embedding_backward(std::span<const std::int32_t> ids, const Tensor& dy,
                        Tensor& dtable) {
  const std::size_t d = dtable.cols();
  if (dy.rows() != ids.size() || dy.cols() != d) {
    fail(ErrorKind::kDimension, "embedding backward: upstream " + shape_string(dy.shape()));
  }
  for (std::size_t i = 0; i < ids.size(); ++i) {
    double* tr = dtable.row(static_cast<std::size_t>(ids[i]));
    const double* gr = dy.row(i);
    for (std::size_t j = 0; j < d; ++j) tr[j] += gr[j];
  }
}

Tensor dropout(const Tensor& x, double p, bool train, std::uint64_t seed,
               DropoutMask* mask) {
  if (!(p >= 0.0 && p < 1.0)) {
    fail(ErrorKind::kConfig, "dropout: p must lie in [0, 1)");
  }
  if (mask) *mask = DropoutMask{};
  if (!train || p == 0.0) return x;

  SplitMix64 rng(seed);
  const double scale = 1.0 / (1.0 - p);
  DropoutMask local;
  local.keep.resize(x.size());
  local.scale = scale;
  Tensor y(x.shape());
  for (std::size_t i = 0; i < x.size(); ++i) {
    const bool keep = rng.uniform() >= p;
    local.keep[i] = keep ? 1 : 0;
    y[i] = keep ? x[i] * scale : 0.0;
  }
  if (mask) *mask = std::move(local);
  return y;
}

Tensor dropout_backward(const DropoutMask& mask, const Tensor& dy) {
  if (mask.keep.empty()) return dy;
  if (mask.keep.size() != dy.size()) {
    fail(ErrorKind::kDimension, "dropout backward: mask size mismatch");
  }
  Tensor dx(dy.shape());
  for (std::size_t i = 0; i < dy.size(); ++i) {
    dx[i] = mask.keep[i] ? dy[i] * mask.scale : 0.0;
  }
  return dx;
}

}  // namespace codemix::nn
