#ifndef HANDMOTION_NN_GRAPH_HPP_
#define HANDMOTION_NN_GRAPH_HPP_

#include <cstddef>
#include <functional>
#include <limits>
#include <optional>
#include <random>
#include <string>
#include <unordered_map>
#include <vector>

#include "handmotion/nn/tensor.hpp"

namespace handmotion::nn {

// Handle to a node recorded on a Graph.
struct Var {
  static constexpr std::size_t kNone = std::numeric_limits<std::size_t>::max();
  std::size_t id = kNone;
  bool valid() const { return id != kNone; }
};

// Tape-based reverse-mode differentiation over the handful of layers the
// motion model uses. Every op records its output and a closure that pushes
// the output gradient back to its inputs. Values are checked for NaN/Inf
// after every op.
//
// A graph is built for one forward pass and discarded; parameters live in a
// ParamStore and receive accumulated gradients when backward() runs.
class Graph {
 public:
  explicit Graph(ParamStore* params = nullptr) : params_(params) {}

  Graph(const Graph&) = delete;
  Graph& operator=(const Graph&) = delete;

  // Constant input; never receives a gradient.
  Var input(Tensor value);
  // Free leaf whose gradient is readable through grad() after backward.
  Var leaf(Tensor value);
  // Reads the named parameter from the store. Repeated requests for the same
  // name return the same node.
  Var param(const std::string& name);

  const Tensor& value(Var v) const;
  // Gradient of the last backward() loss w.r.t. v (zeros if unreached).
  Tensor grad(Var v) const;
  std::size_t node_count() const { return nodes_.size(); }

  // x [T, Cin], w [K, Cin, Cout], b [Cout] -> [T, Cout]; output t only sees
  // inputs t - (K-1-k) * dilation for k in [0, K), zero before the start.
  Var causal_conv1d(Var x, Var w, Var b, std::size_t dilation);
  // x [N, In], w [In, Out], b [Out] -> [N, Out].
  Var linear(Var x, Var w, Var b);
  // a [N, M], b [M, P] -> [N, P].
  Var matmul(Var a, Var b);
  Var add(Var a, Var b);
  Var mul(Var a, Var b);
  Var scale(Var a, double s);
  Var relu(Var a);
  Var sigmoid(Var a);
  // Row-wise softmax of a [N, C].
  Var softmax_rows(Var a);
  // Row-wise x / sum(x) for nonnegative rows with a positive sum.
  Var l1_normalize_rows(Var a);
  // Inverted dropout; identity when p == 0.
  Var dropout(Var a, double p, std::mt19937_64& rng);
  Var reshape(Var a, Shape shape);
  // Prepends zero rows so a [T, C] becomes [rows, C].
  Var pad_front_rows(Var a, std::size_t rows);
  // a [N, C] -> [1, count] holding columns [C - count, C) of row 0.
  Var tail_columns(Var a, std::size_t count);
  // a [N, C] -> [1, C].
  Var row(Var a, std::size_t r);
  // Stacks [1, C] (or [C]) rows into [N, C].
  Var concat_rows(const std::vector<Var>& rows);
  // Sum of all elements -> [1].
  Var sum(Var a);
  // Cosine similarity of two equally sized tensors -> [1].
  Var cosine_similarity(Var a, Var b);

  // Mean over rows of -log softmax(logits)[label].
  Var softmax_cross_entropy(Var logits, const std::vector<std::size_t>& labels);
  // Contrastive loss over the rows of z [B, D]: for every ordered pair (i, j),
  // i != j, with labels[i] == labels[j],
  //   l_ij = -log(exp(s_ij / tau) / sum_{k != i} exp(s_ik / tau))
  // with s the cosine similarity; returns the mean of l_ij over all pairs.
  Var nt_xent(Var z, const std::vector<std::size_t>& labels, double tau);

  // Accumulates d(loss)/d(param) into the ParamStore gradient slots. The
  // loss must be a single value. Throws StateError if nothing was recorded
  // or backward already ran.
  void backward(Var loss);

 private:
  struct Node {
    Tensor value;
    Tensor grad;
    bool requires_grad = false;
    std::optional<std::size_t> param_index;
    std::function<void()> backward;
  };

  Var push(Tensor value, bool requires_grad, std::string_view op);
  Node& node(Var v);
  const Node& node(Var v) const;
  bool needs(Var v) const { return node(v).requires_grad; }
  // Gradient buffer of v, allocated on first use.
  Tensor& grad_of(Var v);

  ParamStore* params_;
  std::vector<Node> nodes_;
  std::unordered_map<std::size_t, Var> param_vars_;
  bool backward_done_ = false;
};

}  // namespace handmotion::nn

#endif  // HANDMOTION_NN_GRAPH_HPP_
