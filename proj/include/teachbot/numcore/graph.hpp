#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "teachbot/numcore/parameter.hpp"
#include "teachbot/numcore/tensor.hpp"

namespace teachbot::num {

class Graph;

/// Handle to a node of a Graph. Cheap to copy; valid while the graph lives.
struct Var {
  Graph* graph = nullptr;
  std::uint32_t id = 0;

  const Tensor& value() const;
  double scalar() const { return value().item(); }
  std::size_t size() const { return value().size(); }
  explicit operator bool() const { return graph != nullptr; }
};

/// Reverse-mode tape. Nodes are appended in evaluation order, so the tape
/// is already topologically sorted and backward() walks it in reverse.
/// Parameter nodes read and accumulate straight into Parameter::value /
/// Parameter::grad.
class Graph {
 public:
  using BackwardFn = std::function<void(Graph&, std::uint32_t self)>;

  Graph() = default;
  Graph(const Graph&) = delete;
  Graph& operator=(const Graph&) = delete;

  Var constant(Tensor value);
  Var param(Parameter& p);
  // Row `index` of a matrix parameter; the backward pass touches only that row.
  Var lookup(Parameter& table, std::size_t index);

  // Appends an op node. Throws NumericError if `value` is not finite.
  Var push(std::string_view op, Tensor value, std::vector<std::uint32_t> inputs, BackwardFn backward);

  const Tensor& value(std::uint32_t id) const;
  const Tensor& value(Var v) const { return value(v.id); }
  bool needs_grad(std::uint32_t id) const { return nodes_[id].needs_grad; }
  const std::vector<std::uint32_t>& inputs(std::uint32_t id) const { return nodes_[id].inputs; }

  // Gradient buffer of a node, allocated (zeroed) on first access.
  Tensor& grad(std::uint32_t id);
  const Tensor& grad_of(Var v) const;

  /// Seeds d(loss)/d(loss) = 1 and propagates. Parameter gradients are
  /// accumulated, not overwritten.
  void backward(Var loss);

  std::size_t size() const { return nodes_.size(); }

 private:
  struct Node {
    Tensor value;
    Tensor grad;
    Parameter* param = nullptr;
    std::vector<std::uint32_t> inputs;
    BackwardFn backward;
    bool needs_grad = false;
  };

  Var make(Node node);

  std::vector<Node> nodes_;
  std::unordered_map<const Parameter*, std::uint32_t> param_nodes_;
};

// --- differentiable ops -----------------------------------------------------
// All ops require their inputs to live on the same graph.

Var add(Var a, Var b);
Var sub(Var a, Var b);
Var mul(Var a, Var b);            // elementwise
Var scale(Var a, Var s);          // a * s, s scalar
Var scale(Var a, double s);
Var divide(Var a, Var s);         // a / s, s scalar
Var exp(Var a);
Var sum(Var a);
Var dot(Var a, Var b);
Var matvec(Var m, Var x);          // m x
Var matvec_t(Var m, Var x);        // m^T x
Var affine(Var m, Var x, Var b);   // m x + b
Var concat(std::span<const Var> parts);
Var slice(Var a, std::size_t offset, std::size_t length);
Var stack(std::span<const Var> rows);  // rows -> matrix
Var row(Var m, std::size_t r);          // matrix row as a vector
Var cosine(Var a, Var b);
Var cosine_rows(Var query, Var rows);  // cosine(query, row_i) for every row
Var softmax(Var logits);
/// Fused LSTM cell. `preact` holds the pre-activations of the input,
/// forget and output gates and the candidate, in that order (4H).
/// Returns [h'; c'] (2H).
Var lstm_cell(Var preact, Var c_prev);
/// -log(max(p[gold], floor)).
Var nll(Var probs, std::size_t gold, double floor = 1e-12);

}  // namespace teachbot::num
