#pragma once

#include <cstddef>
#include <initializer_list>
#include <span>
#include <string>
#include <vector>

namespace teachbot::num {

using Shape = std::vector<std::size_t>;

std::size_t shape_size(const Shape& shape);
std::string shape_string(const Shape& shape);

/// Dense row-major tensor of doubles. Rank 0 (scalar), 1 (vector) and
/// 2 (matrix) are the only ranks the model uses, but nothing here
/// depends on that.
class Tensor {
 public:
  Tensor() = default;
  explicit Tensor(Shape shape, double fill = 0.0);
  Tensor(Shape shape, std::vector<double> values);

  static Tensor scalar(double v) { return Tensor(Shape{}, std::vector<double>{v}); }
  static Tensor vector(std::vector<double> values);
  static Tensor vector(std::initializer_list<double> values) {
    return vector(std::vector<double>(values));
  }
  static Tensor zeros(std::size_t n) { return Tensor(Shape{n}); }
  static Tensor matrix(std::size_t rows, std::size_t cols, std::vector<double> values);

  const Shape& shape() const { return shape_; }
  std::size_t rank() const { return shape_.size(); }
  std::size_t size() const { return values_.size(); }
  bool empty() const { return values_.empty(); }
  std::size_t rows() const;
  std::size_t cols() const;

  double& operator[](std::size_t i) { return values_[i]; }
  double operator[](std::size_t i) const { return values_[i]; }
  double& at(std::size_t r, std::size_t c) { return values_[r * cols() + c]; }
  double at(std::size_t r, std::size_t c) const { return values_[r * cols() + c]; }
  double item() const;

  std::span<double> values() { return values_; }
  std::span<const double> values() const { return values_; }
  std::span<double> row(std::size_t r);
  std::span<const double> row(std::size_t r) const;
  double* data() { return values_.data(); }
  const double* data() const { return values_.data(); }

  void fill(double v);
  bool all_finite() const;
  double norm() const;

  bool operator==(const Tensor& other) const = default;

 private:
  Shape shape_;
  std::vector<double> values_;
};

double dot(std::span<const double> a, std::span<const double> b);
double l2_norm(std::span<const double> a);

}  // namespace teachbot::num
