#include "teachbot/numcore/tensor.hpp"

#include <cmath>
#include <numeric>
#include <sstream>

#include "teachbot/error.hpp"

namespace teachbot::num {

std::size_t shape_size(const Shape& shape) {
  return std::accumulate(shape.begin(), shape.end(), std::size_t{1},
                         [](std::size_t a, std::size_t b) { return a * b; });
}

std::string shape_string(const Shape& shape) {
  std::ostringstream os;
  os << '[';
  for (std::size_t i = 0; i < shape.size(); ++i) {
    if (i) os << ',';
    os << shape[i];
  }
  os << ']';
  return os.str();
}

Tensor::Tensor(Shape shape, double fill)
    : shape_(std::move(shape)), values_(shape_size(shape_), fill) {}

Tensor::Tensor(Shape shape, std::vector<double> values)
    : shape_(std::move(shape)), values_(std::move(values)) {
  if (values_.size() != shape_size(shape_)) {
    throw ArgumentError("tensor: " + std::to_string(values_.size()) +
                        " values do not fit shape " + shape_string(shape_));
  }
}

Tensor Tensor::vector(std::vector<double> values) {
  const std::size_t n = values.size();
  return Tensor(Shape{n}, std::move(values));
}

Tensor Tensor::matrix(std::size_t rows, std::size_t cols, std::vector<double> values) {
  return Tensor(Shape{rows, cols}, std::move(values));
}

std::size_t Tensor::rows() const {
  if (shape_.size() != 2) throw ArgumentError("rows() on tensor of rank " + std::to_string(rank()));
  return shape_[0];
}

std::size_t Tensor::cols() const {
  if (shape_.size() != 2) throw ArgumentError("cols() on tensor of rank " + std::to_string(rank()));
  return shape_[1];
}

double Tensor::item() const {
  if (values_.size() != 1) throw ArgumentError("item() on tensor of shape " + shape_string(shape_));
  return values_[0];
}

std::span<double> Tensor::row(std::size_t r) {
  const std::size_t c = cols();
  return std::span<double>(values_).subspan(r * c, c);
}

std::span<const double> Tensor::row(std::size_t r) const {
  const std::size_t c = cols();
  return std::span<const double>(values_).subspan(r * c, c);
}

void Tensor::fill(double v) { std::fill(values_.begin(), values_.end(), v); }

bool Tensor::all_finite() const {
  for (double v : values_)
    if (!std::isfinite(v)) return false;
  return true;
}

double Tensor::norm() const { return l2_norm(values_); }

double dot(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) {
    throw ArgumentError("dot: length mismatch " + std::to_string(a.size()) + " vs " +
                        std::to_string(b.size()));
  }
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

double l2_norm(std::span<const double> a) { return std::sqrt(dot(a, a)); }

}  // namespace teachbot::num
