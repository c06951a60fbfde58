#pragma once

#include <cmath>
#include <functional>
#include <span>
#include <utility>
#include <vector>

#include "teachbot/numcore/graph.hpp"
#include "teachbot/numcore/tensor.hpp"

namespace teachbot::num {

inline double sigmoid(double x) {
  if (x >= 0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

/// Max-shifted softmax. Throws ArgumentError on empty input and
/// NumericError on non-finite input.
std::vector<double> softmax(std::span<const double> logits);

/// Cosine similarity in [-1, 1]; 0 when either side has zero norm.
double cosine(std::span<const double> a, std::span<const double> b);

/// Weights of one LSTM layer: gates = w [x; h] + b, w is 4H x (X + H).
struct LstmWeights {
  Tensor w;
  Tensor b;

  std::size_t hidden() const { return b.size() / 4; }
  std::size_t input() const { return w.cols() - hidden(); }
};

struct LstmOutput {
  Tensor h;
  Tensor c;
};

LstmOutput lstm_step(std::span<const double> x, std::span<const double> h, std::span<const double> c,
                     const LstmWeights& weights);

struct LstmVars {
  Var h;
  Var c;
};

/// Differentiable step; `w` and `b` are graph nodes (usually parameters).
LstmVars lstm_step(Var x, Var h, Var c, Var w, Var b);

/// Scales every gradient by max_norm / g when the global L2 norm g exceeds
/// max_norm. Returns the norm before clipping.
double clip_global_norm(std::span<Tensor* const> grads, double max_norm = 5.0);
double clip_global_norm(ParameterSet& params, double max_norm = 5.0);

/// Central differences, one coordinate at a time.
Tensor finite_diff_grad(const std::function<double(const Tensor&)>& f, const Tensor& x, double h = 1e-5);

/// Same, restricted to `coords`; other entries are left at zero.
Tensor finite_diff_grad(const std::function<double(const Tensor&)>& f, const Tensor& x,
                        std::span<const std::size_t> coords, double h = 1e-5);

/// ||a - b|| / max(||a||, ||b||), or the absolute difference when both norms
/// are below `tiny`.
double relative_error(std::span<const double> analytic, std::span<const double> numeric, double tiny = 1e-8);

}  // namespace teachbot::num
