#include "codemix/training/loss.hpp"

#include <cmath>
#include <string>

#include "codemix/error.hpp"

namespace codemix::training {

LossResult cross_entropy_loss(const nn::Tensor& probs, std::span<const std::size_t> labels) {
  const std::size_t n = probs.rows();
  const std::size_t classes = probs.cols();
  if (labels.size() != n) {
    fail(ErrorKind::kDimension, "cross_entropy_loss: " + std::to_string(labels.size()) +
                                    " labels for " + std::to_string(n) + " rows");
  }
  LossResult out;
  out.dlogits = nn::Tensor(probs.shape());
  if (n == 0) return out;
  const double inv_n = 1.0 / static_cast<double>(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (labels[i] >= classes) {
      fail(ErrorKind::kData, "cross_entropy_loss: label " + std::to_string(labels[i]) +
                                 " >= n_classes " + std::to_string(classes));
    }
    const double* p = probs.row(i);
    out.loss -= std::log(p[labels[i]]);
    double* g = out.dlogits.row(i);
    for (std::size_t k = 0; k < classes; ++k) {
      g[k] = (p[k] - (k == labels[i] ? 1.0 : 0.0)) * inv_n;
    }
  }
  out.loss *= inv_n;
  return out;
}

}  // namespace codemix::training
