#include "teachbot/numcore/functions.hpp"

#include <algorithm>
#include <array>
#include <string>

#include "teachbot/error.hpp"

namespace teachbot::num {

std::vector<double> softmax(std::span<const double> logits) {
  if (logits.empty()) throw ArgumentError("softmax: empty input");
  double mx = logits[0];
  for (double v : logits) {
    if (!std::isfinite(v)) throw NumericError("softmax: non-finite logit");
    mx = std::max(mx, v);
  }
  std::vector<double> out(logits.size());
  double z = 0.0;
  for (std::size_t i = 0; i < logits.size(); ++i) {
    out[i] = std::exp(logits[i] - mx);
    z += out[i];
  }
  for (double& v : out) v /= z;
  return out;
}

double cosine(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) {
    throw ArgumentError("cosine: length mismatch " + std::to_string(a.size()) + " vs " + std::to_string(b.size()));
  }
  const double na = l2_norm(a);
  const double nb = l2_norm(b);
  if (na == 0.0 || nb == 0.0) return 0.0;
  return std::clamp(dot(a, b) / (na * nb), -1.0, 1.0);
}

LstmOutput lstm_step(std::span<const double> x, std::span<const double> h, std::span<const double> c,
                     const LstmWeights& weights) {
  Graph g;
  auto as_tensor = [](std::span<const double> s) { return Tensor::vector(std::vector<double>(s.begin(), s.end())); };
  const LstmVars out = lstm_step(g.constant(as_tensor(x)), g.constant(as_tensor(h)), g.constant(as_tensor(c)),
                                 g.constant(weights.w), g.constant(weights.b));
  return {out.h.value(), out.c.value()};
}

LstmVars lstm_step(Var x, Var h, Var c, Var w, Var b) {
  const std::size_t hidden = h.size();
  if (c.size() != hidden || b.size() != 4 * hidden || w.value().rank() != 2 ||
      w.value().rows() != 4 * hidden || w.value().cols() != x.size() + hidden) {
    throw ArgumentError("lstm_step: x" + shape_string(x.value().shape()) + " h" + shape_string(h.value().shape()) +
                        " c" + shape_string(c.value().shape()) + " inconsistent with w" +
                        shape_string(w.value().shape()) + " b" + shape_string(b.value().shape()));
  }
  const std::array<Var, 2> xh{x, h};
  const Var hc = lstm_cell(affine(w, concat(xh), b), c);
  return {slice(hc, 0, hidden), slice(hc, hidden, hidden)};
}

double clip_global_norm(std::span<Tensor* const> grads, double max_norm) {
  double sq = 0.0;
  for (const Tensor* g : grads) {
    if (!g->all_finite()) throw NumericError("clip_global_norm: non-finite gradient");
    for (double v : g->values()) sq += v * v;
  }
  const double norm = std::sqrt(sq);
  // A tensor clipped once can sit a few ulps above max_norm; leave it alone
  // so clipping stays idempotent.
  if (norm > max_norm * (1.0 + 1e-12)) {
    const double k = max_norm / norm;
    for (Tensor* g : grads)
      for (double& v : g->values()) v *= k;
  }
  return norm;
}

double clip_global_norm(ParameterSet& params, double max_norm) {
  std::vector<Tensor*> grads;
  grads.reserve(params.size());
  for (std::size_t i = 0; i < params.size(); ++i) grads.push_back(&params[i].grad);
  return clip_global_norm(grads, max_norm);
}

Tensor finite_diff_grad(const std::function<double(const Tensor&)>& f, const Tensor& x, double h) {
  std::vector<std::size_t> all(x.size());
  for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;
  return finite_diff_grad(f, x, all, h);
}

Tensor finite_diff_grad(const std::function<double(const Tensor&)>& f, const Tensor& x,
                        std::span<const std::size_t> coords, double h) {
  Tensor grad(x.shape());
  Tensor probe = x;
  for (std::size_t i : coords) {
    if (i >= x.size()) throw ArgumentError("finite_diff_grad: coordinate out of range");
    const double orig = probe[i];
    probe[i] = orig + h;
    const double up = f(probe);
    probe[i] = orig - h;
    const double down = f(probe);
    probe[i] = orig;
    if (!std::isfinite(up) || !std::isfinite(down)) {
      throw NumericError("finite_diff_grad: non-finite function value at coordinate " + std::to_string(i));
    }
    grad[i] = (up - down) / (2.0 * h);
  }
  return grad;
}

double relative_error(std::span<const double> analytic, std::span<const double> numeric, double tiny) {
  if (analytic.size() != numeric.size()) throw ArgumentError("relative_error: length mismatch");
  double diff = 0.0;
  for (std::size_t i = 0; i < analytic.size(); ++i) diff += (analytic[i] - numeric[i]) * (analytic[i] - numeric[i]);
  diff = std::sqrt(diff);
  const double scale = std::max(l2_norm(analytic), l2_norm(numeric));
  if (scale < tiny) return diff;
  return diff / scale;
}

}  // namespace teachbot::num
