#ifndef HANDMOTION_TESTS_TEST_UTIL_HPP_
#define HANDMOTION_TESTS_TEST_UTIL_HPP_

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "handmotion/augment.hpp"
#include "handmotion/nn/graph.hpp"
#include "handmotion/skeleton.hpp"

namespace handmotion::testing {

// A plausible random 7-joint hand: fingertips fanned above the palm top.
inline HandSkeleton random_hand(std::mt19937_64& rng, double palm = 1.0) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::vector<Point3> j(kSimplifiedJointCount);
  j[0] = Point3(u(rng), u(rng), u(rng)) * 5.0;
  const Point3 up = Point3(u(rng), 1.0 + 0.2 * u(rng), u(rng)).normalized();
  j[1] = j[0] + palm * up;
  for (std::size_t f = 0; f < 5; ++f) {
    const Point3 d = Point3(u(rng), 1.0, u(rng)).normalized();
    j[2 + f] = j[1] + palm * (0.6 + 0.3 * (u(rng) + 1.0)) * d;
  }
  return HandSkeleton(std::move(j), std::string(kSimplifiedFormat));
}

// Random-walk sequence of `length` simplified frames.
inline MotionSequence random_sequence(std::mt19937_64& rng,
                                      std::size_t length) {
  std::normal_distribution<double> n(0.0, 0.05);
  MotionSequence seq;
  HandSkeleton cur = random_hand(rng);
  for (std::size_t t = 0; t < length; ++t) {
    seq.frames.push_back(cur);
    std::vector<Point3> next = cur.joints();
    const Point3 drift(n(rng), n(rng), n(rng));
    for (auto& p : next) p += drift + Point3(n(rng), n(rng), n(rng));
    cur = HandSkeleton(std::move(next), std::string(kSimplifiedFormat));
  }
  return seq;
}

inline nn::Tensor random_tensor(nn::Shape shape, std::mt19937_64& rng,
                                double scale = 1.0) {
  std::normal_distribution<double> n(0.0, scale);
  nn::Tensor t(std::move(shape));
  for (auto& v : t.values()) v = n(rng);
  return t;
}

inline double relative_error(double a, double b) {
  return std::abs(a - b) / std::max({std::abs(a), std::abs(b), 1e-6});
}

// Largest relative error between analytic and central-difference gradients
// of `loss(graph, leaves)` with respect to every leaf (and every parameter
// when `params` is given).
using LossBuilder =
    std::function<nn::Var(nn::Graph&, const std::vector<nn::Var>&)>;

inline double max_gradient_error(std::vector<nn::Tensor> leaves,
                                 const LossBuilder& build,
                                 nn::ParamStore* params = nullptr,
                                 double h = 1e-6) {
  auto evaluate = [&](const std::vector<nn::Tensor>& values) {
    nn::Graph g(params);
    std::vector<nn::Var> vars;
    for (const auto& v : values) vars.push_back(g.input(v));
    return g.value(build(g, vars))[0];
  };
  if (params) params->zero_grad();
  nn::Graph g(params);
  std::vector<nn::Var> vars;
  for (const auto& v : leaves) vars.push_back(g.leaf(v));
  g.backward(build(g, vars));

  double worst = 0.0;
  for (std::size_t l = 0; l < leaves.size(); ++l) {
    const nn::Tensor analytic = g.grad(vars[l]);
    for (std::size_t i = 0; i < leaves[l].size(); ++i) {
      const double keep = leaves[l][i];
      leaves[l][i] = keep + h;
      const double up = evaluate(leaves);
      leaves[l][i] = keep - h;
      const double down = evaluate(leaves);
      leaves[l][i] = keep;
      worst = std::max(worst,
                       relative_error(analytic[i], (up - down) / (2.0 * h)));
    }
  }
  if (params) {
    for (auto& e : params->entries()) {
      const nn::Tensor analytic = e.grad;
      for (std::size_t i = 0; i < e.value.size(); ++i) {
        const double keep = e.value[i];
        e.value[i] = keep + h;
        const double up = evaluate(leaves);
        e.value[i] = keep - h;
        const double down = evaluate(leaves);
        e.value[i] = keep;
        worst = std::max(
            worst, relative_error(analytic[i], (up - down) / (2.0 * h)));
      }
    }
    params->zero_grad();
  }
  return worst;
}

}  // namespace handmotion::testing

#endif  // HANDMOTION_TESTS_TEST_UTIL_HPP_
