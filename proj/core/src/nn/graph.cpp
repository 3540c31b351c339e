#include "handmotion/nn/graph.hpp"

#include <algorithm>
#include <cmath>

#include "handmotion/errors.hpp"

namespace handmotion::nn {

namespace {

void require_rank2(const Tensor& t, const char* op) {
  if (t.rank() != 2) {
    throw DimensionError(std::string(op) + ": expected a rank-2 tensor, got " +
                         shape_string(t.shape()));
  }
}

void require_same_shape(const Tensor& a, const Tensor& b, const char* op) {
  if (a.shape() != b.shape()) {
    throw DimensionError(std::string(op) + ": shape mismatch " +
                         shape_string(a.shape()) + " vs " +
                         shape_string(b.shape()));
  }
}

double stable_sigmoid(double x) {
  if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

}  // namespace

Var Graph::push(Tensor value, bool requires_grad, std::string_view op) {
  value.check_finite(std::string(op));
  Node n;
  n.value = std::move(value);
  n.requires_grad = requires_grad;
  nodes_.push_back(std::move(n));
  return Var{nodes_.size() - 1};
}

Graph::Node& Graph::node(Var v) {
  if (!v.valid() || v.id >= nodes_.size()) {
    throw StateError("graph variable does not belong to this graph");
  }
  return nodes_[v.id];
}

const Graph::Node& Graph::node(Var v) const {
  if (!v.valid() || v.id >= nodes_.size()) {
    throw StateError("graph variable does not belong to this graph");
  }
  return nodes_[v.id];
}

Tensor& Graph::grad_of(Var v) {
  Node& n = node(v);
  if (n.grad.size() != n.value.size()) n.grad = Tensor(n.value.shape());
  return n.grad;
}

Var Graph::input(Tensor value) { return push(std::move(value), false, "input"); }

Var Graph::leaf(Tensor value) { return push(std::move(value), true, "leaf"); }

Var Graph::param(const std::string& name) {
  if (!params_) throw StateError("graph has no parameter store");
  const std::size_t idx = params_->index_of(name);
  if (const auto it = param_vars_.find(idx); it != param_vars_.end()) {
    return it->second;
  }
  Var v = push(params_->entries()[idx].value, true, "param " + name);
  nodes_[v.id].param_index = idx;
  param_vars_.emplace(idx, v);
  return v;
}

const Tensor& Graph::value(Var v) const { return node(v).value; }

Tensor Graph::grad(Var v) const {
  const Node& n = node(v);
  if (n.grad.size() == n.value.size()) return n.grad;
  return Tensor(n.value.shape());
}

Var Graph::causal_conv1d(Var x, Var w, Var b, std::size_t dilation) {
  const Tensor& xv = value(x);
  const Tensor& wv = value(w);
  const Tensor& bv = value(b);
  require_rank2(xv, "causal_conv1d");
  if (wv.rank() != 3 || wv.dim(1) != xv.dim(1) || bv.size() != wv.dim(2)) {
    throw DimensionError("causal_conv1d: input " + shape_string(xv.shape()) +
                         ", weights " + shape_string(wv.shape()) + ", bias " +
                         shape_string(bv.shape()));
  }
  if (dilation < 1) throw DimensionError("causal_conv1d: dilation must be >= 1");
  const std::size_t steps = xv.dim(0);
  const std::size_t kernel = wv.dim(0);
  const std::size_t cin = wv.dim(1);
  const std::size_t cout = wv.dim(2);

  Tensor out({steps, cout});
  auto o = out.matrix();
  o.rowwise() = bv.matrix(1).row(0);
  const auto xm = xv.matrix();
  for (std::size_t k = 0; k < kernel; ++k) {
    const std::size_t shift = (kernel - 1 - k) * dilation;
    if (shift >= steps) continue;
    const std::size_t n = steps - shift;
    ConstMatrixMap wk(wv.data() + k * cin * cout, cin, cout);
    o.bottomRows(n).noalias() += xm.topRows(n) * wk;
  }

  Var y = push(std::move(out), needs(x) || needs(w) || needs(b),
               "causal_conv1d");
  if (!needs(y)) return y;
  nodes_[y.id].backward = [this, x, w, b, y, dilation, steps, kernel, cin,
                           cout]() {
    const auto g = node(y).grad.matrix();
    const auto xm = value(x).matrix();
    const Tensor& wv = value(w);
    if (needs(b)) grad_of(b).matrix(1).row(0) += g.colwise().sum();
    for (std::size_t k = 0; k < kernel; ++k) {
      const std::size_t shift = (kernel - 1 - k) * dilation;
      if (shift >= steps) continue;
      const std::size_t n = steps - shift;
      if (needs(w)) {
        MatrixMap gwk(grad_of(w).data() + k * cin * cout, cin, cout);
        gwk.noalias() += xm.topRows(n).transpose() * g.bottomRows(n);
      }
      if (needs(x)) {
        ConstMatrixMap wk(wv.data() + k * cin * cout, cin, cout);
        grad_of(x).matrix().topRows(n).noalias() +=
            g.bottomRows(n) * wk.transpose();
      }
    }
  };
  return y;
}

Var Graph::linear(Var x, Var w, Var b) {
  const Tensor& xv = value(x);
  const Tensor& wv = value(w);
  const Tensor& bv = value(b);
  require_rank2(xv, "linear");
  require_rank2(wv, "linear");
  if (wv.dim(0) != xv.dim(1) || bv.size() != wv.dim(1)) {
    throw DimensionError("linear: input " + shape_string(xv.shape()) +
                         ", weights " + shape_string(wv.shape()) + ", bias " +
                         shape_string(bv.shape()));
  }
  Tensor out({xv.dim(0), wv.dim(1)});
  auto o = out.matrix();
  o.noalias() = xv.matrix() * wv.matrix();
  o.rowwise() += bv.matrix(1).row(0);
  Var y = push(std::move(out), needs(x) || needs(w) || needs(b), "linear");
  if (!needs(y)) return y;
  nodes_[y.id].backward = [this, x, w, b, y]() {
    const auto g = node(y).grad.matrix();
    if (needs(b)) grad_of(b).matrix(1).row(0) += g.colwise().sum();
    if (needs(w)) {
      grad_of(w).matrix().noalias() += value(x).matrix().transpose() * g;
    }
    if (needs(x)) {
      grad_of(x).matrix().noalias() += g * value(w).matrix().transpose();
    }
  };
  return y;
}

Var Graph::matmul(Var a, Var b) {
  const Tensor& av = value(a);
  const Tensor& bv = value(b);
  require_rank2(av, "matmul");
  require_rank2(bv, "matmul");
  if (av.dim(1) != bv.dim(0)) {
    throw DimensionError("matmul: " + shape_string(av.shape()) + " x " +
                         shape_string(bv.shape()));
  }
  Tensor out({av.dim(0), bv.dim(1)});
  out.matrix().noalias() = av.matrix() * bv.matrix();
  Var y = push(std::move(out), needs(a) || needs(b), "matmul");
  if (!needs(y)) return y;
  nodes_[y.id].backward = [this, a, b, y]() {
    const auto g = node(y).grad.matrix();
    if (needs(a)) {
      grad_of(a).matrix().noalias() += g * value(b).matrix().transpose();
    }
    if (needs(b)) {
      grad_of(b).matrix().noalias() += value(a).matrix().transpose() * g;
    }
  };
  return y;
}

Var Graph::add(Var a, Var b) {
  require_same_shape(value(a), value(b), "add");
  Tensor out = value(a);
  const Tensor& bv = value(b);
  for (std::size_t i = 0; i < out.size(); ++i) out[i] += bv[i];
  Var y = push(std::move(out), needs(a) || needs(b), "add");
  if (!needs(y)) return y;
  nodes_[y.id].backward = [this, a, b, y]() {
    const Tensor& g = node(y).grad;
    for (Var in : {a, b}) {
      if (!needs(in)) continue;
      Tensor& gi = grad_of(in);
      for (std::size_t i = 0; i < g.size(); ++i) gi[i] += g[i];
    }
  };
  return y;
}

Var Graph::mul(Var a, Var b) {
  require_same_shape(value(a), value(b), "mul");
  Tensor out = value(a);
  const Tensor& bv = value(b);
  for (std::size_t i = 0; i < out.size(); ++i) out[i] *= bv[i];
  Var y = push(std::move(out), needs(a) || needs(b), "mul");
  if (!needs(y)) return y;
  nodes_[y.id].backward = [this, a, b, y]() {
    const Tensor& g = node(y).grad;
    if (needs(a)) {
      Tensor& ga = grad_of(a);
      const Tensor& bv = value(b);
      for (std::size_t i = 0; i < g.size(); ++i) ga[i] += g[i] * bv[i];
    }
    if (needs(b)) {
      Tensor& gb = grad_of(b);
      const Tensor& av = value(a);
      for (std::size_t i = 0; i < g.size(); ++i) gb[i] += g[i] * av[i];
    }
  };
  return y;
}

Var Graph::scale(Var a, double s) {
  Tensor out = value(a);
  for (auto& v : out.values()) v *= s;
  Var y = push(std::move(out), needs(a), "scale");
  if (!needs(y)) return y;
  nodes_[y.id].backward = [this, a, y, s]() {
    const Tensor& g = node(y).grad;
    Tensor& ga = grad_of(a);
    for (std::size_t i = 0; i < g.size(); ++i) ga[i] += s * g[i];
  };
  return y;
}

Var Graph::relu(Var a) {
  Tensor out = value(a);
  for (auto& v : out.values()) v = v > 0.0 ? v : 0.0;
  Var y = push(std::move(out), needs(a), "relu");
  if (!needs(y)) return y;
  nodes_[y.id].backward = [this, a, y]() {
    const Tensor& g = node(y).grad;
    const Tensor& av = value(a);
    Tensor& ga = grad_of(a);
    for (std::size_t i = 0; i < g.size(); ++i) {
      if (av[i] > 0.0) ga[i] += g[i];
    }
  };
  return y;
}

Var Graph::sigmoid(Var a) {
  Tensor out = value(a);
  for (auto& v : out.values()) v = stable_sigmoid(v);
  Var y = push(std::move(out), needs(a), "sigmoid");
  if (!needs(y)) return y;
  nodes_[y.id].backward = [this, a, y]() {
    const Tensor& g = node(y).grad;
    const Tensor& s = value(y);
    Tensor& ga = grad_of(a);
    for (std::size_t i = 0; i < g.size(); ++i) {
      ga[i] += g[i] * s[i] * (1.0 - s[i]);
    }
  };
  return y;
}

Var Graph::softmax_rows(Var a) {
  require_rank2(value(a), "softmax_rows");
  Tensor out = value(a);
  auto m = out.matrix();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    const double mx = m.row(r).maxCoeff();
    m.row(r) = (m.row(r).array() - mx).exp();
    m.row(r) /= m.row(r).sum();
  }
  Var y = push(std::move(out), needs(a), "softmax_rows");
  if (!needs(y)) return y;
  nodes_[y.id].backward = [this, a, y]() {
    const auto g = node(y).grad.matrix();
    const auto p = value(y).matrix();
    auto ga = grad_of(a).matrix();
    for (Eigen::Index r = 0; r < p.rows(); ++r) {
      const double dot = g.row(r).dot(p.row(r));
      ga.row(r).array() += p.row(r).array() * (g.row(r).array() - dot);
    }
  };
  return y;
}

Var Graph::l1_normalize_rows(Var a) {
  require_rank2(value(a), "l1_normalize_rows");
  Tensor out = value(a);
  auto m = out.matrix();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    if ((m.row(r).array() < 0.0).any() || !(m.row(r).sum() > 0.0)) {
      throw NumericalError(
          "l1_normalize_rows: inputs must be nonnegative with a positive sum");
    }
    m.row(r) /= m.row(r).sum();
  }
  Var y = push(std::move(out), needs(a), "l1_normalize_rows");
  if (!needs(y)) return y;
  nodes_[y.id].backward = [this, a, y]() {
    const auto g = node(y).grad.matrix();
    const auto yv = value(y).matrix();
    const auto av = value(a).matrix();
    auto ga = grad_of(a).matrix();
    for (Eigen::Index r = 0; r < yv.rows(); ++r) {
      const double s = av.row(r).sum();
      const double dot = g.row(r).dot(yv.row(r));
      ga.row(r).array() += (g.row(r).array() - dot) / s;
    }
  };
  return y;
}

Var Graph::dropout(Var a, double p, std::mt19937_64& rng) {
  if (p < 0.0 || p >= 1.0) throw UsageError("dropout: p must lie in [0, 1)");
  if (p == 0.0) return a;
  Tensor mask(value(a).shape());
  std::bernoulli_distribution keep(1.0 - p);
  for (auto& m : mask.values()) m = keep(rng) ? 1.0 / (1.0 - p) : 0.0;
  return mul(a, input(std::move(mask)));
}

Var Graph::reshape(Var a, Shape shape) {
  Tensor out = value(a).reshaped(std::move(shape));
  Var y = push(std::move(out), needs(a), "reshape");
  if (!needs(y)) return y;
  nodes_[y.id].backward = [this, a, y]() {
    const Tensor& g = node(y).grad;
    Tensor& ga = grad_of(a);
    for (std::size_t i = 0; i < g.size(); ++i) ga[i] += g[i];
  };
  return y;
}

Var Graph::pad_front_rows(Var a, std::size_t rows) {
  const Tensor& av = value(a);
  require_rank2(av, "pad_front_rows");
  if (rows < av.dim(0)) {
    throw DimensionError("pad_front_rows: " + std::to_string(av.dim(0)) +
                         " rows exceed target " + std::to_string(rows));
  }
  const std::size_t pad = rows - av.dim(0);
  Tensor out({rows, av.dim(1)});
  std::copy(av.data(), av.data() + av.size(), out.data() + pad * av.dim(1));
  Var y = push(std::move(out), needs(a), "pad_front_rows");
  if (!needs(y)) return y;
  nodes_[y.id].backward = [this, a, y, pad]() {
    const Tensor& g = node(y).grad;
    Tensor& ga = grad_of(a);
    const std::size_t offset = pad * value(a).dim(1);
    for (std::size_t i = 0; i < ga.size(); ++i) ga[i] += g[offset + i];
  };
  return y;
}

Var Graph::tail_columns(Var a, std::size_t count) {
  const Tensor& av = value(a);
  require_rank2(av, "tail_columns");
  const std::size_t cols = av.dim(1);
  if (count == 0 || count > cols) {
    throw DimensionError("tail_columns: count " + std::to_string(count) +
                         " out of range for " + std::to_string(cols));
  }
  const std::size_t start = cols - count;
  Tensor out({1, count});
  for (std::size_t i = 0; i < count; ++i) out[i] = av[start + i];
  Var y = push(std::move(out), needs(a), "tail_columns");
  if (!needs(y)) return y;
  nodes_[y.id].backward = [this, a, y, start, count]() {
    const Tensor& g = node(y).grad;
    Tensor& ga = grad_of(a);
    for (std::size_t i = 0; i < count; ++i) ga[start + i] += g[i];
  };
  return y;
}

Var Graph::row(Var a, std::size_t r) {
  const Tensor& av = value(a);
  require_rank2(av, "row");
  if (r >= av.dim(0)) throw DimensionError("row: index out of range");
  const std::size_t cols = av.dim(1);
  Tensor out({1, cols});
  std::copy(av.data() + r * cols, av.data() + (r + 1) * cols, out.data());
  Var y = push(std::move(out), needs(a), "row");
  if (!needs(y)) return y;
  nodes_[y.id].backward = [this, a, y, r, cols]() {
    const Tensor& g = node(y).grad;
    Tensor& ga = grad_of(a);
    for (std::size_t i = 0; i < cols; ++i) ga[r * cols + i] += g[i];
  };
  return y;
}

Var Graph::concat_rows(const std::vector<Var>& rows) {
  if (rows.empty()) throw DimensionError("concat_rows: no inputs");
  const std::size_t cols = value(rows.front()).size();
  bool any_grad = false;
  for (Var r : rows) {
    if (value(r).size() != cols) {
      throw DimensionError("concat_rows: rows differ in width");
    }
    any_grad = any_grad || needs(r);
  }
  Tensor out({rows.size(), cols});
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const Tensor& rv = value(rows[i]);
    std::copy(rv.data(), rv.data() + cols, out.data() + i * cols);
  }
  Var y = push(std::move(out), any_grad, "concat_rows");
  if (!needs(y)) return y;
  nodes_[y.id].backward = [this, rows, y, cols]() {
    const Tensor& g = node(y).grad;
    for (std::size_t i = 0; i < rows.size(); ++i) {
      if (!needs(rows[i])) continue;
      Tensor& gr = grad_of(rows[i]);
      for (std::size_t c = 0; c < cols; ++c) gr[c] += g[i * cols + c];
    }
  };
  return y;
}

Var Graph::sum(Var a) {
  double total = 0.0;
  for (double v : value(a).values()) total += v;
  Var y = push(Tensor({1}, {total}), needs(a), "sum");
  if (!needs(y)) return y;
  nodes_[y.id].backward = [this, a, y]() {
    const double g = node(y).grad[0];
    for (auto& v : grad_of(a).values()) v += g;
  };
  return y;
}

Var Graph::cosine_similarity(Var a, Var b) {
  const Tensor& av = value(a);
  const Tensor& bv = value(b);
  if (av.size() != bv.size()) {
    throw DimensionError("cosine_similarity: size mismatch");
  }
  double dot = 0.0, na = 0.0, nb = 0.0;
  for (std::size_t i = 0; i < av.size(); ++i) {
    dot += av[i] * bv[i];
    na += av[i] * av[i];
    nb += bv[i] * bv[i];
  }
  if (na == 0.0 || nb == 0.0) {
    throw NumericalError("cosine_similarity: zero-norm input");
  }
  na = std::sqrt(na);
  nb = std::sqrt(nb);
  const double s = dot / (na * nb);
  Var y = push(Tensor({1}, {s}), needs(a) || needs(b), "cosine_similarity");
  if (!needs(y)) return y;
  nodes_[y.id].backward = [this, a, b, y, na, nb, s]() {
    const double g = node(y).grad[0];
    const Tensor& av = value(a);
    const Tensor& bv = value(b);
    if (needs(a)) {
      Tensor& ga = grad_of(a);
      for (std::size_t i = 0; i < av.size(); ++i) {
        ga[i] += g * (bv[i] / (na * nb) - s * av[i] / (na * na));
      }
    }
    if (needs(b)) {
      Tensor& gb = grad_of(b);
      for (std::size_t i = 0; i < bv.size(); ++i) {
        gb[i] += g * (av[i] / (na * nb) - s * bv[i] / (nb * nb));
      }
    }
  };
  return y;
}

Var Graph::softmax_cross_entropy(Var logits,
                                 const std::vector<std::size_t>& labels) {
  const Tensor& lv = value(logits);
  require_rank2(lv, "softmax_cross_entropy");
  const std::size_t batch = lv.dim(0);
  const std::size_t classes = lv.dim(1);
  if (labels.size() != batch) {
    throw DimensionError(
        shape_message("softmax_cross_entropy labels", batch, labels.size()));
  }
  Tensor probs(lv.shape());
  double loss = 0.0;
  for (std::size_t r = 0; r < batch; ++r) {
    if (labels[r] >= classes) {
      throw DimensionError("softmax_cross_entropy: label out of range");
    }
    const double* row = lv.data() + r * classes;
    const double mx = *std::max_element(row, row + classes);
    double z = 0.0;
    for (std::size_t c = 0; c < classes; ++c) z += std::exp(row[c] - mx);
    const double log_z = mx + std::log(z);
    for (std::size_t c = 0; c < classes; ++c) {
      probs[r * classes + c] = std::exp(row[c] - log_z);
    }
    loss += log_z - row[labels[r]];
  }
  loss /= static_cast<double>(batch);
  Var y = push(Tensor({1}, {loss}), needs(logits), "softmax_cross_entropy");
  if (!needs(y)) return y;
  nodes_[y.id].backward = [this, logits, y, labels, probs = std::move(probs),
                           batch, classes]() {
    const double g = node(y).grad[0] / static_cast<double>(batch);
    Tensor& gl = grad_of(logits);
    for (std::size_t r = 0; r < batch; ++r) {
      for (std::size_t c = 0; c < classes; ++c) {
        const double target = c == labels[r] ? 1.0 : 0.0;
        gl[r * classes + c] += g * (probs[r * classes + c] - target);
      }
    }
  };
  return y;
}

Var Graph::nt_xent(Var z, const std::vector<std::size_t>& labels, double tau) {
  const Tensor& zv = value(z);
  require_rank2(zv, "nt_xent");
  if (!(tau > 0.0)) throw UsageError("nt_xent: temperature must be > 0");
  const auto batch = static_cast<Eigen::Index>(zv.dim(0));
  if (labels.size() != zv.dim(0)) {
    throw DimensionError(shape_message("nt_xent labels", zv.dim(0),
                                       labels.size()));
  }
  if (batch < 2) throw DimensionError("nt_xent: need at least two rows");

  using Matrix =
      Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
  const auto zm = zv.matrix();
  Eigen::VectorXd norms = zm.rowwise().norm();
  if ((norms.array() == 0.0).any()) {
    throw NumericalError("nt_xent: zero-norm descriptor");
  }
  Matrix u = zm.array().colwise() / norms.array();
  Matrix sim = u * u.transpose();

  // Per-anchor log-sum-exp over k != i and positive counts.
  Eigen::VectorXd lse(batch);
  Eigen::VectorXd positives(batch);
  Matrix soft = Matrix::Zero(batch, batch);
  double pair_count = 0.0;
  double total = 0.0;
  for (Eigen::Index i = 0; i < batch; ++i) {
    double mx = -std::numeric_limits<double>::infinity();
    for (Eigen::Index k = 0; k < batch; ++k) {
      if (k != i) mx = std::max(mx, sim(i, k) / tau);
    }
    double acc = 0.0;
    for (Eigen::Index k = 0; k < batch; ++k) {
      if (k != i) acc += std::exp(sim(i, k) / tau - mx);
    }
    lse(i) = mx + std::log(acc);
    for (Eigen::Index k = 0; k < batch; ++k) {
      if (k != i) soft(i, k) = std::exp(sim(i, k) / tau - lse(i));
    }
    double n_pos = 0.0;
    for (Eigen::Index j = 0; j < batch; ++j) {
      if (j != i && labels[j] == labels[i]) {
        total += lse(i) - sim(i, j) / tau;
        n_pos += 1.0;
      }
    }
    positives(i) = n_pos;
    pair_count += n_pos;
  }
  if (pair_count == 0.0) {
    throw UsageError("nt_xent: batch contains no positive pairs");
  }
  const double loss = total / pair_count;
  Var y = push(Tensor({1}, {loss}), needs(z), "nt_xent");
  if (!needs(y)) return y;
  nodes_[y.id].backward = [this, z, y, labels, tau, pair_count,
                           norms = std::move(norms), u = std::move(u),
                           soft = std::move(soft),
                           positives = std::move(positives)]() {
    const double g = node(y).grad[0];
    const Eigen::Index n = u.rows();
    // d loss / d sim(i, k)
    Matrix gs = Matrix::Zero(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
      for (Eigen::Index k = 0; k < n; ++k) {
        if (k == i) continue;
        const double pos = labels[k] == labels[i] ? 1.0 : 0.0;
        gs(i, k) = g * (positives(i) * soft(i, k) - pos) / (tau * pair_count);
      }
    }
    const Matrix gu = (gs + gs.transpose()) * u;
    auto gz = grad_of(z).matrix();
    for (Eigen::Index i = 0; i < n; ++i) {
      const double radial = gu.row(i).dot(u.row(i));
      gz.row(i) += (gu.row(i) - radial * u.row(i)) / norms(i);
    }
  };
  return y;
}

void Graph::backward(Var loss) {
  if (nodes_.empty() || !loss.valid() || loss.id >= nodes_.size()) {
    throw StateError("backward called before a forward pass was recorded");
  }
  if (backward_done_) throw StateError("backward already ran on this graph");
  if (node(loss).value.size() != 1) {
    throw DimensionError("backward: loss must be a single value, got " +
                         shape_string(node(loss).value.shape()));
  }
  backward_done_ = true;
  if (!needs(loss)) return;
  grad_of(loss)[0] = 1.0;
  for (std::size_t id = loss.id + 1; id-- > 0;) {
    Node& n = nodes_[id];
    if (!n.requires_grad || n.grad.size() != n.value.size()) continue;
    if (n.backward) n.backward();
    if (n.param_index && params_) {
      Tensor& dst = params_->entries()[*n.param_index].grad;
      for (std::size_t i = 0; i < dst.size(); ++i) dst[i] += n.grad[i];
    }
  }
}

}  // namespace handmotion::nn
