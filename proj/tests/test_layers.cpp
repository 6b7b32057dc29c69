#include <doctest.h>

#include <cmath>

#include "hcrn/grad_check.hpp"
#include "hcrn/layers.hpp"

using namespace hcrn;

TEST_CASE("init_uniform stays in range and is seed-deterministic") {
  Rng a(42, "init");
  Rng b(42, "init");
  const auto ta = init_uniform<double>({32, 32}, a);
  const auto tb = init_uniform<double>({32, 32}, b);
  for (std::size_t i = 0; i < ta.numel(); ++i) {
    CHECK(ta[i] >= -0.1);
    CHECK(ta[i] <= 0.1);
    CHECK(ta[i] == tb[i]);
  }

  Rng c(7, "mean");
  double sum = 0;
  const std::size_t n = 1000000;
  for (std::size_t i = 0; i < n; ++i) sum += c.real(-0.1, 0.1);
  const double mean = sum / static_cast<double>(n);
  CHECK(mean > -0.001);
  CHECK(mean < 0.001);

  Rng d(0, "bad");
  CHECK_THROWS_AS(init_uniform<double>({2}, d, 0.1, -0.1), ConfigError);
}

TEST_CASE("gru_step closed forms") {
  // zero parameters, zero state: z = 0.5, candidate = 0, next state = 0
  GruCell<double> cell("cc.l0", 3, 2);
  Tape<double> t;
  Var h = cell.step(t, t.zeros(2), t.leaf(Tensor<double>::vec({1, -2, 3})));
  CHECK(t.value(h)[0] == 0.0);
  CHECK(t.value(h)[1] == 0.0);

  // scalar cell driven so z ~= 1 and the candidate is tanh(1)
  GruCell<double> s("s", 1, 1);
  s.bz.value[0] = 100.0;  // update gate saturated open
  s.Wh.value[0] = 1.0;
  Tape<double> t2;
  Var h2 = s.step(t2, t2.zeros(1), t2.leaf(Tensor<double>::vec({1.0})));
  CHECK(t2.value(h2)[0] == doctest::Approx(std::tanh(1.0)).epsilon(1e-12));

  // when the candidate equals the previous state, any gate keeps it fixed
  for (double gate_bias : {-3.0, 0.0, 2.5}) {
    GruCell<double> f("f", 1, 1);
    f.bz.value[0] = gate_bias;
    f.bh.value[0] = 0.7;  // candidate tanh(0.7), independent of input
    Tape<double> t3;
    Var hp = t3.leaf(Tensor<double>::vec({std::tanh(0.7)}));
    Var h3 = f.step(t3, hp, t3.leaf(Tensor<double>::vec({0.0})));
    CHECK(t3.value(h3)[0] == doctest::Approx(std::tanh(0.7)).epsilon(1e-12));
  }

  Tape<double> t4;
  CHECK_THROWS_AS(cell.step(t4, t4.zeros(3), t4.leaf(Tensor<double>::vec({1}))),
                  DimensionError);
}

TEST_CASE("gru_step gradient matches finite differences across configs") {
  Rng rng(13, "gru-fd");
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t in = 1 + rng.below(4);
    const std::size_t hid = 1 + rng.below(4);
    GruCell<double> cell("g", in, hid);
    cell.init(rng);
    // wider weights than the training init to exercise the nonlinearities
    for (Parameter<double>* p : cell.params())
      for (auto& v : p->value.v) v = rng.real(-0.8, 0.8);
    Parameter<double> h0("h0", init_uniform<double>({hid}, rng, -0.9, 0.9));
    Parameter<double> x("x", init_uniform<double>({in}, rng, -1, 1));
    Parameter<double> r("r", init_uniform<double>({1, hid}, rng, -1, 1));

    std::vector<Parameter<double>*> ps = cell.params();
    ps.push_back(&h0);
    ps.push_back(&x);
    ps.push_back(&r);
    const double err = grad_check<double>(
        [&](Tape<double>& t) {
          return t.matvec(t.param(r), cell.step(t, t.param(h0), t.param(x)));
        },
        ps);
    CHECK(err < 1e-4);
  }
}

TEST_CASE("gru_step output stays inside the unit box") {
  // weights kept moderate so double-precision tanh cannot round to exactly 1
  Rng rng(29, "gru-box");
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t hid = 1 + rng.below(6);
    GruCell<double> cell("g", 2, hid);
    for (Parameter<double>* p : cell.params())
      for (auto& v : p->value.v) v = rng.real(-1, 1);
    Tape<double> t;
    Var h0 = t.leaf(init_uniform<double>({hid}, rng, -0.999, 0.999));
    Var x = t.leaf(init_uniform<double>({2}, rng, -1, 1));
    Var h = cell.step(t, h0, x);
    for (double v : t.value(h).v) CHECK(std::abs(v) < 1.0);
  }
}

TEST_CASE("gru stack composes layer by layer") {
  Rng rng(31, "stack");
  const std::size_t dims_arr[] = {3, 4};
  GruStack<double> stack("st", 2, dims_arr);
  stack.init(rng);

  // one layer degenerates to a single cell step
  const std::size_t one_dim[] = {3};
  GruStack<double> single("s1", 2, one_dim);
  single.init(rng);
  Tape<double> t;
  Var x = t.leaf(Tensor<double>::vec({0.3, -0.4}));
  Var via_stack = single.step(t, single.zero_states(t), x)[0];
  Var via_cell = single.layers[0].step(t, t.zeros(3), x);
  for (std::size_t i = 0; i < 3; ++i)
    CHECK(t.value(via_stack)[i] == t.value(via_cell)[i]);

  // stack over a 3-step sequence equals manual per-layer unrolling
  std::vector<Tensor<double>> xs;
  for (int i = 0; i < 3; ++i)
    xs.push_back(init_uniform<double>({2}, rng, -1, 1));

  Tape<double> ts;
  std::vector<Var> states = stack.zero_states(ts);
  for (const auto& xi : xs) states = stack.step(ts, states, ts.leaf(xi));

  Tape<double> tm;
  Var s0 = tm.zeros(3), s1 = tm.zeros(4);
  for (const auto& xi : xs) {
    s0 = stack.layers[0].step(tm, s0, tm.leaf(xi));
    s1 = stack.layers[1].step(tm, s1, s0);
  }
  for (std::size_t i = 0; i < 4; ++i)
    CHECK(ts.value(states[1])[i] == doctest::Approx(tm.value(s1)[i]).epsilon(1e-15));

  // zero-initialized stack keeps zero states
  GruStack<double> zs("z", 2, dims_arr);
  Tape<double> tz;
  auto zstates = zs.step(tz, zs.zero_states(tz), tz.leaf(xs[0]));
  for (Var v : zstates)
    for (double val : tz.value(v).v) CHECK(val == 0.0);

  Tape<double> tb;
  CHECK_THROWS_AS(stack.step(tb, {tb.zeros(3)}, tb.leaf(xs[0])), StateError);
}

TEST_CASE("mlp produces a distribution and ignores logit shifts") {
  Rng rng(37, "mlp");
  MlpClassifier<double> mlp("mlp", 8, 16, 42);

  // zero weights: uniform over the 42 classes
  Tape<double> t;
  Var p = mlp.probs(t, t.leaf(init_uniform<double>({8}, rng)));
  CHECK(t.value(p).numel() == 42);
  for (double v : t.value(p).v)
    CHECK(v == doctest::Approx(1.0 / 42.0).epsilon(1e-12));

  mlp.init(rng);
  Tensor<double> x = init_uniform<double>({8}, rng, -1, 1);
  Tape<double> t2;
  Var p2 = mlp.probs(t2, t2.leaf(x));
  double sum = 0;
  for (double v : t2.value(p2).v) sum += v;
  CHECK(std::abs(sum - 1.0) < 1e-6);

  std::size_t argmax_before = 0;
  for (std::size_t i = 1; i < 42; ++i)
    if (t2.value(p2)[i] > t2.value(p2)[argmax_before]) argmax_before = i;

  for (auto& b : mlp.b2.value.v) b += 3.25;
  Tape<double> t3;
  Var p3 = mlp.probs(t3, t3.leaf(x));
  std::size_t argmax_after = 0;
  for (std::size_t i = 1; i < 42; ++i)
    if (t3.value(p3)[i] > t3.value(p3)[argmax_after]) argmax_after = i;
  CHECK(argmax_before == argmax_after);

  Tape<double> t4;
  CHECK_THROWS_AS(mlp.logits(t4, t4.zeros(9)), DimensionError);
}

TEST_CASE("embedding lookup bounds") {
  EmbeddingTable<double> e("emb", 5, 3);
  Rng rng(1, "emb");
  e.init(rng);
  Tape<double> t;
  Var v = e.lookup(t, 4);
  CHECK(t.value(v).numel() == 3);
  CHECK_THROWS_AS(e.lookup(t, 5), IndexError);
}
