#pragma once

#include <span>
#include <string>
#include <vector>

#include "hcrn/rng.hpp"
#include "hcrn/tape.hpp"

namespace hcrn {

// i.i.d. uniform init in [lo, hi); deterministic given the rng state.
template <typename S>
Tensor<S> init_uniform(std::vector<std::size_t> shape, Rng& rng,
                       double lo = -0.1, double hi = 0.1) {
  if (!(lo < hi)) throw ConfigError("init_uniform: requires lo < hi");
  Tensor<S> t(std::move(shape));
  for (auto& x : t.v) x = static_cast<S>(rng.real(lo, hi));
  return t;
}

template <typename S>
struct EmbeddingTable {
  std::size_t num_symbols = 0;
  std::size_t dim = 0;
  Parameter<S> weights;

  EmbeddingTable() = default;
  EmbeddingTable(const std::string& name, std::size_t symbols, std::size_t d)
      : num_symbols(symbols), dim(d),
        weights(name, Tensor<S>::zeros({symbols, d})) {}

  bool present() const { return num_symbols > 0; }

  void init(Rng& rng) {
    weights.value = init_uniform<S>({num_symbols, dim}, rng);
  }

  Var lookup(Tape<S>& t, std::size_t id) {
    if (id >= num_symbols)
      throw IndexError("embedding lookup: id " + std::to_string(id) +
                       " out of range " + std::to_string(num_symbols));
    return t.lookup(weights, id);
  }
};

// Gated recurrent cell. Update convention: the update gate z mixes the
// candidate in, h = (1-z) * h_prev + z * h_cand. Biases start at zero.
template <typename S>
struct GruCell {
  std::size_t input_dim = 0;
  std::size_t hidden_dim = 0;
  Parameter<S> Wz, Uz, bz, Wr, Ur, br, Wh, Uh, bh;

  GruCell() = default;
  GruCell(const std::string& prefix, std::size_t in, std::size_t hidden)
      : input_dim(in), hidden_dim(hidden),
        Wz(prefix + ".Wz", Tensor<S>::zeros({hidden, in})),
        Uz(prefix + ".Uz", Tensor<S>::zeros({hidden, hidden})),
        bz(prefix + ".bz", Tensor<S>::zeros({hidden})),
        Wr(prefix + ".Wr", Tensor<S>::zeros({hidden, in})),
        Ur(prefix + ".Ur", Tensor<S>::zeros({hidden, hidden})),
        br(prefix + ".br", Tensor<S>::zeros({hidden})),
        Wh(prefix + ".Wh", Tensor<S>::zeros({hidden, in})),
        Uh(prefix + ".Uh", Tensor<S>::zeros({hidden, hidden})),
        bh(prefix + ".bh", Tensor<S>::zeros({hidden})) {}

  void init(Rng& rng) {
    for (Parameter<S>* w : {&Wz, &Uz, &Wr, &Ur, &Wh, &Uh})
      w->value = init_uniform<S>(w->value.shape, rng);
  }

  std::vector<Parameter<S>*> params() {
    return {&Wz, &Uz, &bz, &Wr, &Ur, &br, &Wh, &Uh, &bh};
  }

  Var step(Tape<S>& t, Var h_prev, Var x) {
    if (t.value(x).numel() != input_dim || t.value(h_prev).numel() != hidden_dim)
      throw DimensionError("gru step: state/input dims do not match cell");
    const Var z = t.sigmoid(t.add(
        t.add(t.matvec(t.param(Wz), x), t.matvec(t.param(Uz), h_prev)),
        t.param(bz)));
    const Var r = t.sigmoid(t.add(
        t.add(t.matvec(t.param(Wr), x), t.matvec(t.param(Ur), h_prev)),
        t.param(br)));
    const Var h_cand = t.tanh(t.add(
        t.add(t.matvec(t.param(Wh), x), t.matvec(t.param(Uh), t.mul(r, h_prev))),
        t.param(bh)));
    return t.add(t.mul(t.one_minus(z), h_prev), t.mul(z, h_cand));
  }
};

// Stack of GRU layers; layer l consumes layer l-1's fresh state.
template <typename S>
struct GruStack {
  std::vector<GruCell<S>> layers;

  GruStack() = default;
  GruStack(const std::string& prefix, std::size_t input_dim,
           std::span<const std::size_t> hidden) {
    for (std::size_t l = 0; l < hidden.size(); ++l)
      layers.emplace_back(prefix + ".l" + std::to_string(l),
                          l == 0 ? input_dim : hidden[l - 1], hidden[l]);
  }

  bool present() const { return !layers.empty(); }
  std::size_t input_dim() const { return layers.front().input_dim; }
  std::size_t top_dim() const { return layers.back().hidden_dim; }

  void init(Rng& rng) {
    for (auto& c : layers) c.init(rng);
  }

  std::vector<Parameter<S>*> params() {
    std::vector<Parameter<S>*> ps;
    for (auto& c : layers)
      for (Parameter<S>* p : c.params()) ps.push_back(p);
    return ps;
  }

  std::vector<Var> zero_states(Tape<S>& t) const {
    std::vector<Var> states;
    for (const auto& c : layers) states.push_back(t.zeros(c.hidden_dim));
    return states;
  }

  std::vector<Var> step(Tape<S>& t, const std::vector<Var>& states, Var x) {
    if (states.size() != layers.size())
      throw StateError("gru stack: expected " + std::to_string(layers.size()) +
                       " states, got " + std::to_string(states.size()));
    std::vector<Var> next;
    Var input = x;
    for (std::size_t l = 0; l < layers.size(); ++l) {
      next.push_back(layers[l].step(t, states[l], input));
      input = next.back();
    }
    return next;
  }
};

// 3-layer classifier head: affine-ReLU, affine-ReLU, affine-softmax.
template <typename S>
struct MlpClassifier {
  std::size_t input_dim = 0;
  std::size_t hidden_dim = 0;
  std::size_t num_classes = 0;
  Parameter<S> W0, b0, W1, b1, W2, b2;

  MlpClassifier() = default;
  MlpClassifier(const std::string& prefix, std::size_t in, std::size_t hidden,
                std::size_t classes)
      : input_dim(in), hidden_dim(hidden), num_classes(classes),
        W0(prefix + ".l0.W", Tensor<S>::zeros({hidden, in})),
        b0(prefix + ".l0.b", Tensor<S>::zeros({hidden})),
        W1(prefix + ".l1.W", Tensor<S>::zeros({hidden, hidden})),
        b1(prefix + ".l1.b", Tensor<S>::zeros({hidden})),
        W2(prefix + ".l2.W", Tensor<S>::zeros({classes, hidden})),
        b2(prefix + ".l2.b", Tensor<S>::zeros({classes})) {}

  bool present() const { return num_classes > 0; }

  void init(Rng& rng) {
    for (Parameter<S>* w : {&W0, &W1, &W2})
      w->value = init_uniform<S>(w->value.shape, rng);
  }

  std::vector<Parameter<S>*> params() {
    return {&W0, &b0, &W1, &b1, &W2, &b2};
  }

  Var logits(Tape<S>& t, Var rep) {
    if (t.value(rep).numel() != input_dim)
      throw DimensionError("mlp: representation width " +
                           t.value(rep).shape_str() + " does not match " +
                           std::to_string(input_dim));
    Var h = t.relu(t.add(t.matvec(t.param(W0), rep), t.param(b0)));
    h = t.relu(t.add(t.matvec(t.param(W1), h), t.param(b1)));
    return t.add(t.matvec(t.param(W2), h), t.param(b2));
  }

  Var probs(Tape<S>& t, Var rep) { return t.softmax(logits(t, rep)); }
};

}  // namespace hcrn
