#include <cmath>

#include <gtest/gtest.h>

#include "handmotion/errors.hpp"
#include "handmotion/nn/graph.hpp"
#include "handmotion/nn/tensor.hpp"
#include "test_util.hpp"

namespace handmotion::nn {
namespace {

using handmotion::testing::random_tensor;

TEST(Tensor, ShapeAndStorage) {
  Tensor t({2, 3}, 1.5);
  EXPECT_EQ(t.size(), 6u);
  EXPECT_EQ(t.rank(), 2u);
  EXPECT_EQ(shape_string(t.shape()), "[2, 3]");
  t.matrix()(1, 2) = 4.0;
  EXPECT_EQ(t[5], 4.0);
  EXPECT_THROW(Tensor({2, 2}, std::vector<double>(3)), DimensionError);
  EXPECT_THROW(t.reshaped({4, 2}), DimensionError);
  EXPECT_EQ(t.reshaped({3, 2}).dim(0), 3u);
}

TEST(Tensor, FiniteCheck) {
  Tensor t({2});
  t[1] = std::numeric_limits<double>::infinity();
  EXPECT_FALSE(t.all_finite());
  EXPECT_THROW(t.check_finite("x"), NumericalError);
}

TEST(ParamStore, DuplicateNamesRejected) {
  ParamStore s;
  s.add("a", Tensor({2}));
  EXPECT_THROW(s.add("a", Tensor({2})), UsageError);
  EXPECT_TRUE(s.contains("a"));
  EXPECT_THROW(s.value("b"), UsageError);
  EXPECT_EQ(s.scalar_count(), 2u);
}

// Triple-loop causal dilated convolution.
Tensor conv_oracle(const Tensor& x, const Tensor& w, const Tensor& b,
                   std::size_t dilation) {
  const std::size_t steps = x.dim(0), cin = x.dim(1);
  const std::size_t k = w.dim(0), cout = w.dim(2);
  Tensor out({steps, cout});
  for (std::size_t t = 0; t < steps; ++t) {
    for (std::size_t o = 0; o < cout; ++o) {
      double acc = b[o];
      for (std::size_t j = 0; j < k; ++j) {
        const long src = static_cast<long>(t) -
                         static_cast<long>((k - 1 - j) * dilation);
        if (src < 0) continue;
        for (std::size_t i = 0; i < cin; ++i) {
          acc += x[static_cast<std::size_t>(src) * cin + i] *
                 w[(j * cin + i) * cout + o];
        }
      }
      out[t * cout + o] = acc;
    }
  }
  return out;
}

TEST(CausalConv, MatchesTripleLoopOracle) {
  std::mt19937_64 rng(1);
  for (std::size_t dilation : {1, 2, 4}) {
    for (std::size_t steps : {1, 3, 9, 20}) {
      const Tensor x = random_tensor({steps, 5}, rng);
      const Tensor w = random_tensor({3, 5, 4}, rng);
      const Tensor b = random_tensor({4}, rng);
      Graph g;
      const Var y = g.causal_conv1d(g.input(x), g.input(w), g.input(b),
                                    dilation);
      const Tensor o = conv_oracle(x, w, b, dilation);
      for (std::size_t i = 0; i < o.size(); ++i) {
        ASSERT_NEAR(g.value(y)[i], o[i], 1e-12);
      }
    }
  }
}

TEST(CausalConv, ShapeErrors) {
  Graph g;
  const Var x = g.input(Tensor({4, 3}));
  EXPECT_THROW(g.causal_conv1d(x, g.input(Tensor({2, 2, 5})),
                               g.input(Tensor({5})), 1),
               DimensionError);
  EXPECT_THROW(g.causal_conv1d(x, g.input(Tensor({2, 3, 5})),
                               g.input(Tensor({5})), 0),
               DimensionError);
}

TEST(Graph, OpsProduceExpectedValues) {
  Graph g;
  const Var a = g.input(Tensor({1, 3}, {1.0, -2.0, 3.0}));
  EXPECT_EQ(g.value(g.relu(a)).storage(), (std::vector<double>{1, 0, 3}));
  EXPECT_NEAR(g.value(g.sigmoid(a))[1], 1.0 / (1.0 + std::exp(2.0)), 1e-15);
  const auto sm = g.value(g.softmax_rows(a));
  EXPECT_NEAR(sm[0] + sm[1] + sm[2], 1.0, 1e-15);
  const Var pos = g.input(Tensor({1, 3}, {1.0, 1.0, 2.0}));
  EXPECT_EQ(g.value(g.l1_normalize_rows(pos)).storage(),
            (std::vector<double>{0.25, 0.25, 0.5}));
  EXPECT_THROW(g.l1_normalize_rows(a), NumericalError);
  EXPECT_EQ(g.value(g.sum(a))[0], 2.0);
  const Var padded = g.pad_front_rows(a, 3);
  EXPECT_EQ(g.value(padded).storage(),
            (std::vector<double>{0, 0, 0, 0, 0, 0, 1, -2, 3}));
  EXPECT_EQ(g.value(g.tail_columns(a, 2)).storage(),
            (std::vector<double>{-2, 3}));
}

TEST(Graph, SigmoidSaturatesWithoutOverflow) {
  Graph g;
  const Var a = g.input(Tensor({2}, {800.0, -800.0}));
  const auto& s = g.value(g.sigmoid(a));
  EXPECT_EQ(s[0], 1.0);
  EXPECT_EQ(s[1], 0.0);
}

TEST(Graph, CosineOfZeroVectorIsNumericalError) {
  Graph g;
  EXPECT_THROW(g.cosine_similarity(g.input(Tensor({3})),
                                   g.input(Tensor({3}, 1.0))),
               NumericalError);
}

TEST(Graph, NonFiniteValuesRejected) {
  Graph g;
  Tensor t({2});
  t[0] = std::numeric_limits<double>::quiet_NaN();
  EXPECT_THROW(g.input(t), NumericalError);
}

TEST(Graph, BackwardStateErrors) {
  Graph empty;
  EXPECT_THROW(empty.backward(Var{0}), StateError);
  Graph g;
  const Var a = g.leaf(Tensor({2}, 1.0));
  EXPECT_THROW(g.backward(a), DimensionError);
  const Var s = g.sum(a);
  g.backward(s);
  EXPECT_THROW(g.backward(s), StateError);
}

TEST(Graph, ParameterNodesAreSharedAndAccumulate) {
  ParamStore store;
  store.add("w", Tensor({2}, {1.0, 2.0}));
  Graph g(&store);
  const Var a = g.param("w");
  const Var b = g.param("w");
  EXPECT_EQ(a.id, b.id);
  g.backward(g.sum(g.add(g.mul(a, a), b)));
  // d/dw (w^2 + w) = 2w + 1
  EXPECT_EQ(store.grad("w").storage(), (std::vector<double>{3.0, 5.0}));
}

TEST(Graph, UnreachedLeafHasZeroGradient) {
  Graph g;
  const Var a = g.leaf(Tensor({2}, 1.0));
  const Var b = g.leaf(Tensor({2}, 1.0));
  g.backward(g.sum(a));
  EXPECT_EQ(g.grad(b).storage(), (std::vector<double>{0.0, 0.0}));
}

TEST(Graph, DropoutZeroIsIdentityAndInvertedOtherwise) {
  std::mt19937_64 rng(2);
  Graph g;
  const Var a = g.input(Tensor({1000}, 1.0));
  EXPECT_EQ(g.dropout(a, 0.0, rng).id, a.id);
  const auto& d = g.value(g.dropout(a, 0.5, rng));
  double mean = 0.0;
  for (double v : d.values()) {
    EXPECT_TRUE(v == 0.0 || v == 2.0);
    mean += v / 1000.0;
  }
  EXPECT_NEAR(mean, 1.0, 0.15);
  EXPECT_THROW(g.dropout(a, 1.0, rng), UsageError);
}

TEST(NtXent, NeedsPositivePairs) {
  Graph g;
  const Var z = g.input(Tensor({3, 2}, {1, 0, 0, 1, 1, 1}));
  EXPECT_THROW(g.nt_xent(z, {0, 1, 2}, 0.1), UsageError);
  EXPECT_THROW(g.nt_xent(z, {0, 0}, 0.1), DimensionError);
  EXPECT_THROW(g.nt_xent(z, {0, 0, 1}, 0.0), UsageError);
}

}  // namespace
}  // namespace handmotion::nn
