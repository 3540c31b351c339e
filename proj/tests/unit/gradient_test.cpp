#include <gtest/gtest.h>

#include "gradcheck_util.hpp"
#include "handmotion/nn/graph.hpp"
#include "test_util.hpp"

namespace handmotion::nn {
namespace {

using handmotion::testing::max_gradient_error;
using handmotion::testing::random_tensor;

constexpr double kTol = 1e-5;

// Reduces any output to a scalar through fixed random weights, so every
// output element contributes a distinct upstream gradient.
Var weighted_sum(Graph& g, Var y, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  return g.sum(g.mul(y, g.input(random_tensor(g.value(y).shape(), rng))));
}

class OpGradient : public ::testing::Test {
 protected:
  std::mt19937_64 rng{42};
};

TEST_F(OpGradient, CausalConv) {
  for (std::size_t dilation : {1, 2, 3}) {
    const double err = max_gradient_error(
        {random_tensor({6, 3}, rng), random_tensor({3, 3, 2}, rng),
         random_tensor({2}, rng)},
        [&](Graph& g, const std::vector<Var>& v) {
          return weighted_sum(g, g.causal_conv1d(v[0], v[1], v[2], dilation),
                              1);
        });
    EXPECT_LT(err, kTol) << "dilation " << dilation;
  }
}

TEST_F(OpGradient, LinearAndMatmul) {
  EXPECT_LT(max_gradient_error({random_tensor({4, 3}, rng),
                                random_tensor({3, 5}, rng),
                                random_tensor({5}, rng)},
                               [](Graph& g, const std::vector<Var>& v) {
                                 return weighted_sum(
                                     g, g.linear(v[0], v[1], v[2]), 2);
                               }),
            kTol);
  EXPECT_LT(max_gradient_error({random_tensor({2, 3}, rng),
                                random_tensor({3, 4}, rng)},
                               [](Graph& g, const std::vector<Var>& v) {
                                 return weighted_sum(g, g.matmul(v[0], v[1]),
                                                     3);
                               }),
            kTol);
}

TEST_F(OpGradient, Elementwise) {
  const auto a = random_tensor({3, 4}, rng);
  const auto b = random_tensor({3, 4}, rng);
  EXPECT_LT(max_gradient_error({a, b},
                               [](Graph& g, const std::vector<Var>& v) {
                                 return weighted_sum(
                                     g, g.add(g.mul(v[0], v[1]), v[0]), 4);
                               }),
            kTol);
  EXPECT_LT(max_gradient_error({a},
                               [](Graph& g, const std::vector<Var>& v) {
                                 return weighted_sum(
                                     g, g.scale(g.relu(v[0]), -2.5), 5);
                               }),
            kTol);
  EXPECT_LT(max_gradient_error({a},
                               [](Graph& g, const std::vector<Var>& v) {
                                 return weighted_sum(g, g.sigmoid(v[0]), 6);
                               }),
            kTol);
}

TEST_F(OpGradient, RowNormalizations) {
  EXPECT_LT(max_gradient_error({random_tensor({3, 5}, rng)},
                               [](Graph& g, const std::vector<Var>& v) {
                                 return weighted_sum(g, g.softmax_rows(v[0]),
                                                     7);
                               }),
            kTol);
  nn::Tensor positive = random_tensor({2, 4}, rng);
  for (auto& x : positive.values()) x = 0.2 + std::abs(x);
  EXPECT_LT(max_gradient_error({positive},
                               [](Graph& g, const std::vector<Var>& v) {
                                 return weighted_sum(
                                     g, g.l1_normalize_rows(v[0]), 8);
                               }),
            kTol);
}

TEST_F(OpGradient, ShapeOps) {
  EXPECT_LT(max_gradient_error(
                {random_tensor({2, 3}, rng), random_tensor({1, 3}, rng)},
                [](Graph& g, const std::vector<Var>& v) {
                  const Var padded = g.pad_front_rows(v[0], 4);
                  const Var flat = g.reshape(padded, {1, 12});
                  const Var tail = g.tail_columns(flat, 5);
                  const Var stacked =
                      g.concat_rows({g.row(v[0], 1), v[1], g.row(v[0], 0)});
                  return g.add(weighted_sum(g, tail, 9),
                               weighted_sum(g, stacked, 10));
                }),
            kTol);
}

TEST_F(OpGradient, CosineSimilarity) {
  EXPECT_LT(max_gradient_error(
                {random_tensor({6}, rng), random_tensor({6}, rng)},
                [](Graph& g, const std::vector<Var>& v) {
                  return g.cosine_similarity(v[0], v[1]);
                }),
            kTol);
}

TEST_F(OpGradient, SoftmaxCrossEntropy) {
  EXPECT_LT(max_gradient_error({random_tensor({4, 3}, rng)},
                               [](Graph& g, const std::vector<Var>& v) {
                                 return g.softmax_cross_entropy(v[0],
                                                                {0, 2, 1, 2});
                               }),
            kTol);
}

TEST_F(OpGradient, NtXent) {
  for (double tau : {0.07, 0.5, 2.0}) {
    EXPECT_LT(max_gradient_error({random_tensor({6, 4}, rng)},
                                 [tau](Graph& g, const std::vector<Var>& v) {
                                   return g.nt_xent(v[0], {0, 0, 1, 1, 2, 2},
                                                    tau);
                                 }),
              kTol)
        << "tau " << tau;
  }
  // Unequal group sizes and a singleton without positives.
  EXPECT_LT(max_gradient_error({random_tensor({6, 3}, rng)},
                               [](Graph& g, const std::vector<Var>& v) {
                                 return g.nt_xent(v[0], {0, 0, 0, 1, 1, 2},
                                                  0.3);
                               }),
            kTol);
}

TEST(ComposedGradient, CrossEntropyThroughWholeModel) {
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    EXPECT_LT(handmotion::testing::composed_gradient_error(
                  seed, handmotion::testing::ComposedLoss::kCrossEntropy),
              1e-4)
        << "seed " << seed;
  }
}

TEST(ComposedGradient, NtXentThroughWholeModel) {
  for (std::uint64_t seed = 11; seed <= 15; ++seed) {
    EXPECT_LT(handmotion::testing::composed_gradient_error(
                  seed, handmotion::testing::ComposedLoss::kNtXent),
              1e-4)
        << "seed " << seed;
  }
}

}  // namespace
}  // namespace handmotion::nn
