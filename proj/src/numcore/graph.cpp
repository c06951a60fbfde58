#include "teachbot/numcore/graph.hpp"

#include <Eigen/Core>
#include <cmath>
#include <string>

#include "teachbot/error.hpp"
#include "teachbot/numcore/functions.hpp"

namespace teachbot::num {

namespace {

using RowMat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using MatMap = Eigen::Map<RowMat>;
using ConstMatMap = Eigen::Map<const RowMat>;
using VecMap = Eigen::Map<Eigen::VectorXd>;
using ConstVecMap = Eigen::Map<const Eigen::VectorXd>;

ConstMatMap as_matrix(const Tensor& t) { return ConstMatMap(t.data(), t.rows(), t.cols()); }
MatMap as_matrix(Tensor& t) { return MatMap(t.data(), t.rows(), t.cols()); }
ConstVecMap as_vector(const Tensor& t) { return ConstVecMap(t.data(), t.size()); }
VecMap as_vector(Tensor& t) { return VecMap(t.data(), t.size()); }

Graph& same_graph(Var a, Var b) {
  if (a.graph == nullptr || a.graph != b.graph) throw ArgumentError("ops on vars from different graphs");
  return *a.graph;
}

void require_vector(const Tensor& t, std::string_view op) {
  if (t.rank() != 1) {
    throw ArgumentError(std::string(op) + ": expected a vector, got shape " + shape_string(t.shape()));
  }
}

void require_same_size(const Tensor& a, const Tensor& b, std::string_view op) {
  if (a.size() != b.size()) {
    throw ArgumentError(std::string(op) + ": size mismatch " + shape_string(a.shape()) + " vs " +
                        shape_string(b.shape()));
  }
}

}  // namespace

const Tensor& Var::value() const { return graph->value(id); }

Var Graph::make(Node node) {
  nodes_.push_back(std::move(node));
  return Var{this, static_cast<std::uint32_t>(nodes_.size() - 1)};
}

Var Graph::constant(Tensor value) {
  if (!value.all_finite()) throw NumericError("constant: non-finite value");
  Node n;
  n.value = std::move(value);
  return make(std::move(n));
}

Var Graph::param(Parameter& p) {
  if (auto it = param_nodes_.find(&p); it != param_nodes_.end()) return Var{this, it->second};
  Node n;
  n.param = &p;
  n.needs_grad = true;
  Var v = make(std::move(n));
  param_nodes_.emplace(&p, v.id);
  return v;
}

Var Graph::lookup(Parameter& table, std::size_t index) {
  if (table.value.rank() != 2 || index >= table.value.rows()) {
    throw ArgumentError("lookup: row " + std::to_string(index) + " out of range for " + table.name +
                        shape_string(table.value.shape()));
  }
  const auto row = table.value.row(index);
  Node n;
  n.value = Tensor::vector(std::vector<double>(row.begin(), row.end()));
  n.needs_grad = true;
  Parameter* tp = &table;
  n.backward = [tp, index](Graph& g, std::uint32_t self) {
    const Tensor& gy = g.grad(self);
    auto dst = tp->grad.row(index);
    for (std::size_t i = 0; i < dst.size(); ++i) dst[i] += gy[i];
  };
  return make(std::move(n));
}

Var Graph::push(std::string_view op, Tensor value, std::vector<std::uint32_t> inputs, BackwardFn backward) {
  if (!value.all_finite()) throw NumericError(std::string(op) + ": produced a non-finite value");
  Node n;
  n.value = std::move(value);
  for (auto in : inputs) n.needs_grad = n.needs_grad || nodes_.at(in).needs_grad;
  n.inputs = std::move(inputs);
  if (n.needs_grad) n.backward = std::move(backward);
  return make(std::move(n));
}

const Tensor& Graph::value(std::uint32_t id) const {
  const Node& n = nodes_.at(id);
  return n.param ? n.param->value : n.value;
}

Tensor& Graph::grad(std::uint32_t id) {
  Node& n = nodes_.at(id);
  if (n.param) return n.param->grad;
  if (n.grad.size() != n.value.size() || n.grad.shape() != n.value.shape()) n.grad = Tensor(n.value.shape());
  return n.grad;
}

const Tensor& Graph::grad_of(Var v) const {
  const Node& n = nodes_.at(v.id);
  return n.param ? n.param->grad : n.grad;
}

void Graph::backward(Var loss) {
  if (loss.graph != this) throw ArgumentError("backward: loss belongs to another graph");
  if (value(loss.id).size() != 1) throw ArgumentError("backward: loss must be a scalar");
  if (!nodes_[loss.id].needs_grad) return;
  grad(loss.id)[0] += 1.0;
  for (std::uint32_t id = loss.id + 1; id-- > 0;) {
    Node& n = nodes_[id];
    if (!n.needs_grad || !n.backward) continue;
    // Nodes nobody consumed have no gradient buffer; skip them.
    if (n.grad.size() == 0 && n.value.size() != 0) continue;
    n.backward(*this, id);
  }
}

// --- ops --------------------------------------------------------------------

namespace {

// Accumulates into an input's gradient only if that input wants one.
template <typename F>
void accumulate(Graph& g, std::uint32_t input, F&& f) {
  if (g.needs_grad(input)) f(g.grad(input));
}

}  // namespace

Var add(Var a, Var b) {
  Graph& g = same_graph(a, b);
  require_same_size(a.value(), b.value(), "add");
  Tensor out = a.value();
  for (std::size_t i = 0; i < out.size(); ++i) out[i] += b.value()[i];
  return g.push("add", std::move(out), {a.id, b.id}, [](Graph& g, std::uint32_t self) {
    const auto& in = g.inputs(self);
    const Tensor& gy = g.grad(self);
    for (auto id : in)
      accumulate(g, id, [&](Tensor& gx) { as_vector(gx) += as_vector(gy); });
  });
}

Var sub(Var a, Var b) {
  Graph& g = same_graph(a, b);
  require_same_size(a.value(), b.value(), "sub");
  Tensor out = a.value();
  for (std::size_t i = 0; i < out.size(); ++i) out[i] -= b.value()[i];
  return g.push("sub", std::move(out), {a.id, b.id}, [](Graph& g, std::uint32_t self) {
    const auto& in = g.inputs(self);
    const Tensor& gy = g.grad(self);
    accumulate(g, in[0], [&](Tensor& gx) { as_vector(gx) += as_vector(gy); });
    accumulate(g, in[1], [&](Tensor& gx) { as_vector(gx) -= as_vector(gy); });
  });
}

Var mul(Var a, Var b) {
  Graph& g = same_graph(a, b);
  require_same_size(a.value(), b.value(), "mul");
  Tensor out = a.value();
  for (std::size_t i = 0; i < out.size(); ++i) out[i] *= b.value()[i];
  return g.push("mul", std::move(out), {a.id, b.id}, [](Graph& g, std::uint32_t self) {
    const auto& in = g.inputs(self);
    const Tensor& gy = g.grad(self);
    const Tensor& av = g.value(in[0]);
    const Tensor& bv = g.value(in[1]);
    accumulate(g, in[0], [&](Tensor& gx) { as_vector(gx) += as_vector(gy).cwiseProduct(as_vector(bv)); });
    accumulate(g, in[1], [&](Tensor& gx) { as_vector(gx) += as_vector(gy).cwiseProduct(as_vector(av)); });
  });
}

Var scale(Var a, Var s) {
  Graph& g = same_graph(a, s);
  if (s.value().size() != 1) throw ArgumentError("scale: factor must be a scalar");
  const double k = s.value()[0];
  Tensor out = a.value();
  for (double& v : out.values()) v *= k;
  return g.push("scale", std::move(out), {a.id, s.id}, [](Graph& g, std::uint32_t self) {
    const auto& in = g.inputs(self);
    const Tensor& gy = g.grad(self);
    const Tensor& av = g.value(in[0]);
    const double k = g.value(in[1])[0];
    accumulate(g, in[0], [&](Tensor& gx) { as_vector(gx) += k * as_vector(gy); });
    accumulate(g, in[1], [&](Tensor& gx) { gx[0] += as_vector(gy).dot(as_vector(av)); });
  });
}

Var divide(Var a, Var s) {
  Graph& g = same_graph(a, s);
  if (s.value().size() != 1) throw ArgumentError("divide: divisor must be a scalar");
  const double k = s.value()[0];
  if (k == 0.0) throw NumericError("divide: division by zero");
  Tensor out = a.value();
  for (double& v : out.values()) v /= k;
  return g.push("divide", std::move(out), {a.id, s.id}, [](Graph& g, std::uint32_t self) {
    const auto& in = g.inputs(self);
    const Tensor& gy = g.grad(self);
    const Tensor& y = g.value(self);
    const double k = g.value(in[1])[0];
    accumulate(g, in[0], [&](Tensor& gx) { as_vector(gx) += as_vector(gy) / k; });
    accumulate(g, in[1], [&](Tensor& gx) { gx[0] -= as_vector(gy).dot(as_vector(y)) / k; });
  });
}

Var scale(Var a, double s) {
  Tensor out = a.value();
  for (double& v : out.values()) v *= s;
  return a.graph->push("scale", std::move(out), {a.id}, [s](Graph& g, std::uint32_t self) {
    const Tensor& gy = g.grad(self);
    accumulate(g, g.inputs(self)[0], [&](Tensor& gx) { as_vector(gx) += s * as_vector(gy); });
  });
}

Var exp(Var a) {
  Tensor out = a.value();
  for (double& v : out.values()) v = std::exp(v);
  return a.graph->push("exp", std::move(out), {a.id}, [](Graph& g, std::uint32_t self) {
    const Tensor& gy = g.grad(self);
    const Tensor& y = g.value(self);
    accumulate(g, g.inputs(self)[0], [&](Tensor& gx) { as_vector(gx) += as_vector(gy).cwiseProduct(as_vector(y)); });
  });
}

Var sum(Var a) {
  double s = 0.0;
  for (double v : a.value().values()) s += v;
  return a.graph->push("sum", Tensor::scalar(s), {a.id}, [](Graph& g, std::uint32_t self) {
    const double gy = g.grad(self)[0];
    accumulate(g, g.inputs(self)[0], [&](Tensor& gx) { as_vector(gx).array() += gy; });
  });
}

Var dot(Var a, Var b) {
  Graph& g = same_graph(a, b);
  const double d = dot(a.value().values(), b.value().values());
  return g.push("dot", Tensor::scalar(d), {a.id, b.id}, [](Graph& g, std::uint32_t self) {
    const auto& in = g.inputs(self);
    const double gy = g.grad(self)[0];
    const Tensor& av = g.value(in[0]);
    const Tensor& bv = g.value(in[1]);
    accumulate(g, in[0], [&](Tensor& gx) { as_vector(gx) += gy * as_vector(bv); });
    accumulate(g, in[1], [&](Tensor& gx) { as_vector(gx) += gy * as_vector(av); });
  });
}

Var matvec(Var m, Var x) {
  Graph& g = same_graph(m, x);
  const Tensor& mv = m.value();
  require_vector(x.value(), "matvec");
  if (mv.rank() != 2 || mv.cols() != x.size()) {
    throw ArgumentError("matvec: " + shape_string(mv.shape()) + " times " + shape_string(x.value().shape()));
  }
  Tensor out(Shape{mv.rows()});
  as_vector(out).noalias() = as_matrix(mv) * as_vector(x.value());
  return g.push("matvec", std::move(out), {m.id, x.id}, [](Graph& g, std::uint32_t self) {
    const auto& in = g.inputs(self);
    const Tensor& gy = g.grad(self);
    const Tensor& mv = g.value(in[0]);
    const Tensor& xv = g.value(in[1]);
    accumulate(g, in[0], [&](Tensor& gm) {
      as_matrix(gm).noalias() += as_vector(gy) * as_vector(xv).transpose();
    });
    accumulate(g, in[1], [&](Tensor& gx) {
      as_vector(gx).noalias() += as_matrix(mv).transpose() * as_vector(gy);
    });
  });
}

Var matvec_t(Var m, Var x) {
  Graph& g = same_graph(m, x);
  const Tensor& mv = m.value();
  require_vector(x.value(), "matvec_t");
  if (mv.rank() != 2 || mv.rows() != x.size()) {
    throw ArgumentError("matvec_t: " + shape_string(mv.shape()) + "^T times " +
                        shape_string(x.value().shape()));
  }
  Tensor out(Shape{mv.cols()});
  as_vector(out).noalias() = as_matrix(mv).transpose() * as_vector(x.value());
  return g.push("matvec_t", std::move(out), {m.id, x.id}, [](Graph& g, std::uint32_t self) {
    const auto& in = g.inputs(self);
    const Tensor& gy = g.grad(self);
    const Tensor& mv = g.value(in[0]);
    const Tensor& xv = g.value(in[1]);
    accumulate(g, in[0], [&](Tensor& gm) {
      as_matrix(gm).noalias() += as_vector(xv) * as_vector(gy).transpose();
    });
    accumulate(g, in[1], [&](Tensor& gx) { as_vector(gx).noalias() += as_matrix(mv) * as_vector(gy); });
  });
}

Var affine(Var m, Var x, Var b) {
  Graph& g = same_graph(m, x);
  same_graph(m, b);
  const Tensor& mv = m.value();
  require_vector(x.value(), "affine");
  if (mv.rank() != 2 || mv.cols() != x.size() || b.size() != mv.rows()) {
    throw ArgumentError("affine: " + shape_string(mv.shape()) + " times " + shape_string(x.value().shape()) +
                        " plus " + shape_string(b.value().shape()));
  }
  Tensor out = b.value();
  as_vector(out).noalias() += as_matrix(mv) * as_vector(x.value());
  return g.push("affine", std::move(out), {m.id, x.id, b.id}, [](Graph& g, std::uint32_t self) {
    const auto& in = g.inputs(self);
    const Tensor& gy = g.grad(self);
    const Tensor& mv = g.value(in[0]);
    const Tensor& xv = g.value(in[1]);
    accumulate(g, in[0], [&](Tensor& gm) {
      as_matrix(gm).noalias() += as_vector(gy) * as_vector(xv).transpose();
    });
    accumulate(g, in[1], [&](Tensor& gx) {
      as_vector(gx).noalias() += as_matrix(mv).transpose() * as_vector(gy);
    });
    accumulate(g, in[2], [&](Tensor& gb) { as_vector(gb) += as_vector(gy); });
  });
}

Var concat(std::span<const Var> parts) {
  if (parts.empty()) throw ArgumentError("concat: no parts");
  Graph& g = *parts.front().graph;
  std::vector<double> out;
  std::vector<std::uint32_t> ids;
  for (const Var& p : parts) {
    same_graph(parts.front(), p);
    require_vector(p.value(), "concat");
    out.insert(out.end(), p.value().values().begin(), p.value().values().end());
    ids.push_back(p.id);
  }
  return g.push("concat", Tensor::vector(std::move(out)), std::move(ids), [](Graph& g, std::uint32_t self) {
    const Tensor& gy = g.grad(self);
    std::size_t offset = 0;
    for (auto id : g.inputs(self)) {
      const std::size_t n = g.value(id).size();
      accumulate(g, id, [&](Tensor& gx) {
        for (std::size_t i = 0; i < n; ++i) gx[i] += gy[offset + i];
      });
      offset += n;
    }
  });
}

Var slice(Var a, std::size_t offset, std::size_t length) {
  require_vector(a.value(), "slice");
  if (offset + length > a.size()) {
    throw ArgumentError("slice: [" + std::to_string(offset) + ", " + std::to_string(offset + length) +
                        ") out of range for length " + std::to_string(a.size()));
  }
  const auto src = a.value().values().subspan(offset, length);
  return a.graph->push("slice", Tensor::vector(std::vector<double>(src.begin(), src.end())), {a.id},
                       [offset, length](Graph& g, std::uint32_t self) {
                         const Tensor& gy = g.grad(self);
                         accumulate(g, g.inputs(self)[0], [&](Tensor& gx) {
                           for (std::size_t i = 0; i < length; ++i) gx[offset + i] += gy[i];
                         });
                       });
}

Var stack(std::span<const Var> rows) {
  if (rows.empty()) throw ArgumentError("stack: no rows");
  Graph& g = *rows.front().graph;
  const std::size_t d = rows.front().size();
  std::vector<double> out;
  out.reserve(rows.size() * d);
  std::vector<std::uint32_t> ids;
  for (const Var& r : rows) {
    same_graph(rows.front(), r);
    require_vector(r.value(), "stack");
    if (r.size() != d) throw ArgumentError("stack: rows of different lengths");
    out.insert(out.end(), r.value().values().begin(), r.value().values().end());
    ids.push_back(r.id);
  }
  return g.push("stack", Tensor::matrix(rows.size(), d, std::move(out)), std::move(ids),
                [](Graph& g, std::uint32_t self) {
                  const Tensor& gy = g.grad(self);
                  const auto& in = g.inputs(self);
                  for (std::size_t r = 0; r < in.size(); ++r) {
                    accumulate(g, in[r], [&](Tensor& gx) {
                      const auto src = gy.row(r);
                      for (std::size_t i = 0; i < src.size(); ++i) gx[i] += src[i];
                    });
                  }
                });
}

Var row(Var m, std::size_t r) {
  const Tensor& mv = m.value();
  if (mv.rank() != 2 || r >= mv.rows()) {
    throw ArgumentError("row: " + std::to_string(r) + " out of range for " + shape_string(mv.shape()));
  }
  const auto src = mv.row(r);
  return m.graph->push("row", Tensor::vector(std::vector<double>(src.begin(), src.end())), {m.id},
                       [r](Graph& g, std::uint32_t self) {
                         const Tensor& gy = g.grad(self);
                         accumulate(g, g.inputs(self)[0], [&](Tensor& gm) {
                           auto dst = gm.row(r);
                           for (std::size_t i = 0; i < dst.size(); ++i) dst[i] += gy[i];
                         });
                       });
}

namespace {

// d cos(a,b) / da, scaled by gy, added into out. Zero-norm inputs carry no gradient.
void cosine_grad(std::span<const double> a, std::span<const double> b, double gy, std::span<double> out) {
  const double na = l2_norm(a);
  const double nb = l2_norm(b);
  if (na == 0.0 || nb == 0.0) return;
  const double c = dot(a, b) / (na * nb);
  const double k1 = gy / (na * nb);
  const double k2 = gy * c / (na * na);
  for (std::size_t i = 0; i < a.size(); ++i) out[i] += k1 * b[i] - k2 * a[i];
}

}  // namespace

Var cosine(Var a, Var b) {
  Graph& g = same_graph(a, b);
  const double c = cosine(a.value().values(), b.value().values());
  return g.push("cosine", Tensor::scalar(c), {a.id, b.id}, [](Graph& g, std::uint32_t self) {
    const auto& in = g.inputs(self);
    const double gy = g.grad(self)[0];
    const auto av = g.value(in[0]).values();
    const auto bv = g.value(in[1]).values();
    accumulate(g, in[0], [&](Tensor& gx) { cosine_grad(av, bv, gy, gx.values()); });
    accumulate(g, in[1], [&](Tensor& gx) { cosine_grad(bv, av, gy, gx.values()); });
  });
}

Var cosine_rows(Var query, Var rows) {
  Graph& g = same_graph(query, rows);
  const Tensor& m = rows.value();
  require_vector(query.value(), "cosine_rows");
  if (m.rank() != 2 || m.cols() != query.size()) {
    throw ArgumentError("cosine_rows: query " + shape_string(query.value().shape()) + " against rows " +
                        shape_string(m.shape()));
  }
  Tensor out(Shape{m.rows()});
  for (std::size_t r = 0; r < m.rows(); ++r) out[r] = cosine(query.value().values(), m.row(r));
  return g.push("cosine_rows", std::move(out), {query.id, rows.id}, [](Graph& g, std::uint32_t self) {
    const auto& in = g.inputs(self);
    const Tensor& gy = g.grad(self);
    const Tensor& q = g.value(in[0]);
    const Tensor& m = g.value(in[1]);
    accumulate(g, in[0], [&](Tensor& gq) {
      for (std::size_t r = 0; r < m.rows(); ++r) cosine_grad(q.values(), m.row(r), gy[r], gq.values());
    });
    accumulate(g, in[1], [&](Tensor& gm) {
      for (std::size_t r = 0; r < m.rows(); ++r) cosine_grad(m.row(r), q.values(), gy[r], gm.row(r));
    });
  });
}

Var softmax(Var logits) {
  require_vector(logits.value(), "softmax");
  Tensor out = Tensor::vector(softmax(logits.value().values()));
  return logits.graph->push("softmax", std::move(out), {logits.id}, [](Graph& g, std::uint32_t self) {
    const Tensor& gy = g.grad(self);
    const Tensor& p = g.value(self);
    const double gp = as_vector(gy).dot(as_vector(p));
    accumulate(g, g.inputs(self)[0], [&](Tensor& gx) {
      for (std::size_t i = 0; i < p.size(); ++i) gx[i] += p[i] * (gy[i] - gp);
    });
  });
}

Var lstm_cell(Var preact, Var c_prev) {
  Graph& g = same_graph(preact, c_prev);
  const std::size_t h = c_prev.size();
  if (preact.size() != 4 * h) {
    throw ArgumentError("lstm_cell: pre-activation length " + std::to_string(preact.size()) +
                        " for hidden size " + std::to_string(h));
  }
  const Tensor& z = preact.value();
  const Tensor& c0 = c_prev.value();
  Tensor out(Shape{2 * h});
  for (std::size_t k = 0; k < h; ++k) {
    const double i = sigmoid(z[k]);
    const double f = sigmoid(z[h + k]);
    const double o = sigmoid(z[2 * h + k]);
    const double cand = std::tanh(z[3 * h + k]);
    const double c = f * c0[k] + i * cand;
    out[h + k] = c;
    out[k] = o * std::tanh(c);
  }
  return g.push("lstm_cell", std::move(out), {preact.id, c_prev.id}, [h](Graph& g, std::uint32_t self) {
    const auto& in = g.inputs(self);
    const Tensor& gy = g.grad(self);
    const Tensor& y = g.value(self);
    const Tensor& z = g.value(in[0]);
    const Tensor& c0 = g.value(in[1]);
    const bool want_z = g.needs_grad(in[0]);
    const bool want_c = g.needs_grad(in[1]);
    Tensor* gz = want_z ? &g.grad(in[0]) : nullptr;
    Tensor* gc0 = want_c ? &g.grad(in[1]) : nullptr;
    for (std::size_t k = 0; k < h; ++k) {
      const double i = sigmoid(z[k]);
      const double f = sigmoid(z[h + k]);
      const double o = sigmoid(z[2 * h + k]);
      const double cand = std::tanh(z[3 * h + k]);
      const double tc = std::tanh(y[h + k]);
      const double dh = gy[k];
      const double dc = gy[h + k] + dh * o * (1.0 - tc * tc);
      if (gz) {
        (*gz)[k] += dc * cand * i * (1.0 - i);
        (*gz)[h + k] += dc * c0[k] * f * (1.0 - f);
        (*gz)[2 * h + k] += dh * tc * o * (1.0 - o);
        (*gz)[3 * h + k] += dc * i * (1.0 - cand * cand);
      }
      if (gc0) (*gc0)[k] += dc * f;
    }
  });
}

Var nll(Var probs, std::size_t gold, double floor) {
  require_vector(probs.value(), "nll");
  if (gold >= probs.size()) {
    throw ArgumentError("nll: gold index " + std::to_string(gold) + " out of range for " +
                        std::to_string(probs.size()) + " candidates");
  }
  const double p = probs.value()[gold];
  const double loss = -std::log(std::max(p, floor));
  return probs.graph->push("nll", Tensor::scalar(loss), {probs.id}, [gold, floor](Graph& g, std::uint32_t self) {
    const double gy = g.grad(self)[0];
    const double p = g.value(g.inputs(self)[0])[gold];
    if (p <= floor) return;
    accumulate(g, g.inputs(self)[0], [&](Tensor& gx) { gx[gold] -= gy / p; });
  });
}

}  // namespace teachbot::num
