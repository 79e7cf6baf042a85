#include "codemix/nn/tensor.hpp"

#include <cmath>
#include <string>

#include "codemix/error.hpp"

namespace codemix::nn {

std::size_t shape_size(const Tensor::Shape& shape) noexcept {
  std::size_t n = 1;
  for (const auto d : shape) n *= d;
  return n;
}

std::string shape_string(const Tensor::Shape& shape) {
  std::string out = "[";
  for (std::size_t i = 0; i < shape.size(); ++i) {
    if (i) out += "x";
    out += std::to_string(shape[i]);
  }
  return out + "]";
}

Tensor::Tensor(Shape shape, double fill)
    : shape_(std::move(shape)), data_(shape_size(shape_), fill) {}

Tensor::Tensor(Shape shape, std::vector<double> data)
    : shape_(std::move(shape)), data_(std::move(data)) {
  if (data_.size() != shape_size(shape_)) {
    fail(ErrorKind::kDimension, "tensor: " + std::to_string(data_.size()) +
                                    " values for shape " + shape_string(shape_));
  }
}

Tensor Tensor::matrix(std::initializer_list<std::initializer_list<double>> rows) {
  const std::size_t n = rows.size();
  const std::size_t m = n ? rows.begin()->size() : 0;
  std::vector<double> data;
  data.reserve(n * m);
  for (const auto& r : rows) {
    if (r.size() != m) fail(ErrorKind::kDimension, "tensor: ragged matrix literal");
    data.insert(data.end(), r.begin(), r.end());
  }
  return Tensor({n, m}, std::move(data));
}

Tensor Tensor::vector(std::initializer_list<double> values) {
  return Tensor({values.size()}, std::vector<double>(values));
}

Tensor Tensor::reshaped(Shape shape) const {
  if (shape_size(shape) != size()) {
    fail(ErrorKind::kDimension, "tensor: cannot reshape " + shape_string(shape_) +
                                    " to " + shape_string(shape));
  }
  return Tensor(std::move(shape), data_);
}

void Tensor::fill(double value) noexcept {
  for (auto& x : data_) x = value;
}

Tensor& Tensor::operator+=(const Tensor& other) {
  require_same_shape(*this, other, "tensor +=");
  for (std::size_t i = 0; i < data_.size(); ++i) data_[i] += other.data_[i];
  return *this;
}

bool Tensor::all_finite() const noexcept {
  for (const double x : data_) {
    if (!std::isfinite(x)) return false;
  }
  return true;
}

void require_same_shape(const Tensor& a, const Tensor& b, std::string_view what) {
  if (a.shape() != b.shape()) {
    fail(ErrorKind::kDimension, std::string(what) + ": shape " +
                                    shape_string(a.shape()) + " vs " +
                                    shape_string(b.shape()));
  }
}

void debug_check_finite([[maybe_unused]] const Tensor& t,
                        [[maybe_unused]] std::string_view what) {
#ifndef NDEBUG
  if (!t.all_finite()) {
    fail(ErrorKind::kNumeric, std::string(what) + ": non-finite value");
  }
#endif
}

}  // namespace codemix::nn
