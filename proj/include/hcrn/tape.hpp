#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <span>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "hcrn/errors.hpp"
#include "hcrn/tensor.hpp"

namespace hcrn {

// Trainable tensor with a persistent gradient slot. Gradients accumulate
// across backward passes and must be zeroed explicitly between minibatches.
template <typename S>
struct Parameter {
  std::string name;
  Tensor<S> value;
  Tensor<S> grad;
  bool frozen = false;

  Parameter() = default;
  Parameter(std::string n, Tensor<S> val)
      : name(std::move(n)), value(std::move(val)) {
    grad = Tensor<S>::zeros(value.shape);
  }

  void zero_grad() { grad.fill(S(0)); }
};

// Handle into a tape's node record.
using Var = std::uint32_t;

// Reverse-mode autodiff tape. Nodes are appended in execution order, so a
// backward walk over the record is a reverse topological sweep. A tape is
// confined to one thread and one forward/backward cycle; reset() starts the
// next one.
template <typename S>
class Tape {
  enum class Op : std::uint8_t {
    leaf,
    param,
    lookup,
    matvec,
    add,
    sub,
    mul,
    sigmoid,
    tanh_fn,
    relu,
    one_minus,
    concat,
    softmax,
    softmax_nll,
  };

  struct Node {
    Op op;
    Var a = 0;
    Var b = 0;
    std::size_t aux = 0;  // lookup row / nll target / concat split point
    Parameter<S>* param = nullptr;
    Tensor<S> value;
    Tensor<S> grad;
  };

 public:
  Var leaf(Tensor<S> t) {
    Node n;
    n.op = Op::leaf;
    n.value = std::move(t);
    return push(std::move(n));
  }

  Var zeros(std::size_t dim) { return leaf(Tensor<S>::zeros({dim})); }

  // Registers a parameter as a graph leaf; repeated registration on the same
  // tape returns the original node.
  Var param(Parameter<S>& p) {
    auto it = param_nodes_.find(&p);
    if (it != param_nodes_.end()) return it->second;
    Node n;
    n.op = Op::param;
    n.param = &p;
    n.value = p.value;
    const Var v = push(std::move(n));
    param_nodes_.emplace(&p, v);
    return v;
  }

  // Row select from a 2-D parameter table; backward scatters into that row.
  Var lookup(Parameter<S>& table, std::size_t row) {
    if (table.value.ndim() != 2)
      throw DimensionError("lookup: table must be 2-D, got " +
                           table.value.shape_str());
    if (row >= table.value.rows())
      throw IndexError("lookup: row " + std::to_string(row) +
                       " out of range for " + table.name);
    const std::size_t d = table.value.cols();
    Node n;
    n.op = Op::lookup;
    n.param = &table;
    n.aux = row;
    n.value = Tensor<S>({d});
    for (std::size_t j = 0; j < d; ++j) n.value[j] = table.value.at2(row, j);
    return push(std::move(n));
  }

  // y = W x for W[m x n], x[n].
  Var matvec(Var w, Var x) {
    const Tensor<S>& W = value(w);
    const Tensor<S>& X = value(x);
    if (W.ndim() != 2 || X.ndim() != 1 || W.cols() != X.numel())
      throw DimensionError("matvec: incompatible shapes " + W.shape_str() +
                           " and " + X.shape_str());
    Node n;
    n.op = Op::matvec;
    n.a = w;
    n.b = x;
    n.value = Tensor<S>({W.rows()});
    for (std::size_t i = 0; i < W.rows(); ++i) {
      S acc = 0;
      const S* wr = &W.v[i * W.cols()];
      for (std::size_t j = 0; j < W.cols(); ++j) acc += wr[j] * X[j];
      n.value[i] = acc;
    }
    return push(std::move(n));
  }

  Var add(Var a, Var b) { return binary(Op::add, a, b); }
  Var sub(Var a, Var b) { return binary(Op::sub, a, b); }
  Var mul(Var a, Var b) { return binary(Op::mul, a, b); }

  Var sigmoid(Var x) {
    Node n = unary(Op::sigmoid, x);
    for (std::size_t i = 0; i < n.value.numel(); ++i) {
      const double xi = static_cast<double>(value(x)[i]);
      const double y = xi >= 0 ? 1.0 / (1.0 + std::exp(-xi))
                               : std::exp(xi) / (1.0 + std::exp(xi));
      n.value[i] = static_cast<S>(y);
    }
    return push(std::move(n));
  }

  Var tanh(Var x) {
    Node n = unary(Op::tanh_fn, x);
    for (std::size_t i = 0; i < n.value.numel(); ++i)
      n.value[i] = static_cast<S>(std::tanh(static_cast<double>(value(x)[i])));
    return push(std::move(n));
  }

  Var relu(Var x) {
    Node n = unary(Op::relu, x);
    for (std::size_t i = 0; i < n.value.numel(); ++i)
      n.value[i] = value(x)[i] > S(0) ? value(x)[i] : S(0);
    return push(std::move(n));
  }

  Var one_minus(Var x) {
    Node n = unary(Op::one_minus, x);
    for (std::size_t i = 0; i < n.value.numel(); ++i)
      n.value[i] = S(1) - value(x)[i];
    return push(std::move(n));
  }

  // 1-D concatenation; backward splits the gradient at the seam.
  Var concat(Var a, Var b) {
    const Tensor<S>& A = value(a);
    const Tensor<S>& B = value(b);
    if (A.ndim() != 1 || B.ndim() != 1)
      throw DimensionError("concat: both operands must be 1-D, got " +
                           A.shape_str() + " and " + B.shape_str());
    Node n;
    n.op = Op::concat;
    n.a = a;
    n.b = b;
    n.aux = A.numel();
    n.value = Tensor<S>({A.numel() + B.numel()});
    std::copy(A.v.begin(), A.v.end(), n.value.v.begin());
    std::copy(B.v.begin(), B.v.end(), n.value.v.begin() + A.numel());
    return push(std::move(n));
  }

  Var softmax(Var logits) {
    const Tensor<S>& L = value(logits);
    if (L.ndim() != 1)
      throw DimensionError("softmax: logits must be 1-D");
    Node n;
    n.op = Op::softmax;
    n.a = logits;
    n.value = Tensor<S>({L.numel()});
    softmax_into(L, n.value);
    return push(std::move(n));
  }

  // loss = -log softmax(logits)[target], stabilized by max subtraction.
  Var softmax_nll(Var logits, std::size_t target) {
    const Tensor<S>& L = value(logits);
    if (L.ndim() != 1)
      throw DimensionError("softmax_nll: logits must be 1-D");
    if (target >= L.numel())
      throw IndexError("softmax_nll: target " + std::to_string(target) +
                       " out of range " + std::to_string(L.numel()));
    double m = -1e300;
    for (S x : L.v) m = std::max(m, static_cast<double>(x));
    double sum = 0;
    for (S x : L.v) sum += std::exp(static_cast<double>(x) - m);
    const double loss = m + std::log(sum) - static_cast<double>(L[target]);
    Node n;
    n.op = Op::softmax_nll;
    n.a = logits;
    n.aux = target;
    n.value = Tensor<S>::scalar(static_cast<S>(loss));
    return push(std::move(n));
  }

  // Accumulates dloss/dparam into every reachable Parameter's grad slot.
  void backward(Var loss) {
    if (swept_)
      throw StateError("backward: tape already swept; run a new forward pass");
    Node& top = node(loss);
    if (top.value.numel() != 1)
      throw DimensionError("backward: loss must be scalar");
    ensure_grad(top);
    top.grad[0] = S(1);
    for (std::size_t i = loss + 1; i-- > 0;) propagate(nodes_[i]);
    swept_ = true;
  }

  const Tensor<S>& value(Var v) const { return node(v).value; }

  const Tensor<S>& grad(Var v) const {
    const Node& n = node(v);
    if (n.grad.numel() == 0)
      throw StateError("grad: no gradient recorded for this node");
    return n.grad;
  }

  double scalar(Var v) const {
    const Tensor<S>& t = value(v);
    if (t.numel() != 1) throw DimensionError("scalar: node is not scalar");
    return static_cast<double>(t[0]);
  }

  std::size_t size() const { return nodes_.size(); }

  void reset() {
    nodes_.clear();
    param_nodes_.clear();
    swept_ = false;
  }

 private:
  Node& node(Var v) {
    if (v >= nodes_.size()) throw IndexError("tape: bad node handle");
    return nodes_[v];
  }
  const Node& node(Var v) const {
    if (v >= nodes_.size()) throw IndexError("tape: bad node handle");
    return nodes_[v];
  }

  Var push(Node&& n) {
    nodes_.push_back(std::move(n));
    return static_cast<Var>(nodes_.size() - 1);
  }

  Node unary(Op op, Var x) {
    Node n;
    n.op = op;
    n.a = x;
    n.value = Tensor<S>(value(x).shape);
    return n;
  }

  Var binary(Op op, Var a, Var b) {
    const Tensor<S>& A = value(a);
    const Tensor<S>& B = value(b);
    if (!A.same_shape(B))
      throw DimensionError("elementwise op: shape mismatch " + A.shape_str() +
                           " vs " + B.shape_str());
    Node n;
    n.op = op;
    n.a = a;
    n.b = b;
    n.value = Tensor<S>(A.shape);
    for (std::size_t i = 0; i < A.numel(); ++i) {
      switch (op) {
        case Op::add: n.value[i] = A[i] + B[i]; break;
        case Op::sub: n.value[i] = A[i] - B[i]; break;
        case Op::mul: n.value[i] = A[i] * B[i]; break;
        default: throw StateError("binary: bad op");
      }
    }
    return push(std::move(n));
  }

  static void softmax_into(const Tensor<S>& logits, Tensor<S>& out) {
    double m = -1e300;
    for (S x : logits.v) m = std::max(m, static_cast<double>(x));
    double sum = 0;
    for (std::size_t i = 0; i < logits.numel(); ++i) {
      const double e = std::exp(static_cast<double>(logits[i]) - m);
      out[i] = static_cast<S>(e);
      sum += e;
    }
    for (std::size_t i = 0; i < out.numel(); ++i)
      out[i] = static_cast<S>(static_cast<double>(out[i]) / sum);
  }

  void ensure_grad(Node& n) {
    if (n.grad.numel() == 0) n.grad = Tensor<S>::zeros(n.value.shape);
  }

  void propagate(Node& n) {
    if (n.grad.numel() == 0) return;  // not reachable from the loss
    switch (n.op) {
      case Op::leaf:
        break;
      case Op::param:
        for (std::size_t i = 0; i < n.grad.numel(); ++i)
          n.param->grad[i] += n.grad[i];
        break;
      case Op::lookup: {
        const std::size_t d = n.value.numel();
        for (std::size_t j = 0; j < d; ++j)
          n.param->grad.at2(n.aux, j) += n.grad[j];
        break;
      }
      case Op::matvec: {
        Node& wn = node(n.a);
        Node& xn = node(n.b);
        ensure_grad(wn);
        ensure_grad(xn);
        const Tensor<S>& W = wn.value;
        const Tensor<S>& X = xn.value;
        for (std::size_t i = 0; i < W.rows(); ++i) {
          const S gi = n.grad[i];
          S* gw = &wn.grad.v[i * W.cols()];
          const S* wr = &W.v[i * W.cols()];
          for (std::size_t j = 0; j < W.cols(); ++j) {
            gw[j] += gi * X[j];
            xn.grad[j] += wr[j] * gi;
          }
        }
        break;
      }
      case Op::add: {
        Node& an = node(n.a);
        Node& bn = node(n.b);
        ensure_grad(an);
        ensure_grad(bn);
        for (std::size_t i = 0; i < n.grad.numel(); ++i) {
          an.grad[i] += n.grad[i];
          bn.grad[i] += n.grad[i];
        }
        break;
      }
      case Op::sub: {
        Node& an = node(n.a);
        Node& bn = node(n.b);
        ensure_grad(an);
        ensure_grad(bn);
        for (std::size_t i = 0; i < n.grad.numel(); ++i) {
          an.grad[i] += n.grad[i];
          bn.grad[i] -= n.grad[i];
        }
        break;
      }
      case Op::mul: {
        Node& an = node(n.a);
        Node& bn = node(n.b);
        ensure_grad(an);
        ensure_grad(bn);
        for (std::size_t i = 0; i < n.grad.numel(); ++i) {
          an.grad[i] += n.grad[i] * bn.value[i];
          bn.grad[i] += n.grad[i] * an.value[i];
        }
        break;
      }
      case Op::sigmoid: {
        Node& an = node(n.a);
        ensure_grad(an);
        for (std::size_t i = 0; i < n.grad.numel(); ++i)
          an.grad[i] += n.grad[i] * n.value[i] * (S(1) - n.value[i]);
        break;
      }
      case Op::tanh_fn: {
        Node& an = node(n.a);
        ensure_grad(an);
        for (std::size_t i = 0; i < n.grad.numel(); ++i)
          an.grad[i] += n.grad[i] * (S(1) - n.value[i] * n.value[i]);
        break;
      }
      case Op::relu: {
        Node& an = node(n.a);
        ensure_grad(an);
        for (std::size_t i = 0; i < n.grad.numel(); ++i)
          if (an.value[i] > S(0)) an.grad[i] += n.grad[i];
        break;
      }
      case Op::one_minus: {
        Node& an = node(n.a);
        ensure_grad(an);
        for (std::size_t i = 0; i < n.grad.numel(); ++i)
          an.grad[i] -= n.grad[i];
        break;
      }
      case Op::concat: {
        Node& an = node(n.a);
        Node& bn = node(n.b);
        ensure_grad(an);
        ensure_grad(bn);
        for (std::size_t i = 0; i < n.aux; ++i) an.grad[i] += n.grad[i];
        for (std::size_t i = n.aux; i < n.grad.numel(); ++i)
          bn.grad[i - n.aux] += n.grad[i];
        break;
      }
      case Op::softmax: {
        Node& an = node(n.a);
        ensure_grad(an);
        double dot = 0;
        for (std::size_t i = 0; i < n.grad.numel(); ++i)
          dot += static_cast<double>(n.grad[i]) * static_cast<double>(n.value[i]);
        for (std::size_t i = 0; i < n.grad.numel(); ++i)
          an.grad[i] += static_cast<S>(
              static_cast<double>(n.value[i]) *
              (static_cast<double>(n.grad[i]) - dot));
        break;
      }
      case Op::softmax_nll: {
        Node& an = node(n.a);
        ensure_grad(an);
        Tensor<S> p(an.value.shape);
        softmax_into(an.value, p);
        const S g = n.grad[0];
        for (std::size_t i = 0; i < p.numel(); ++i) {
          S d = p[i];
          if (i == n.aux) d -= S(1);
          an.grad[i] += g * d;
        }
        break;
      }
    }
  }

  std::vector<Node> nodes_;
  std::unordered_map<const Parameter<S>*, Var> param_nodes_;
  bool swept_ = false;
};

}  // namespace hcrn
