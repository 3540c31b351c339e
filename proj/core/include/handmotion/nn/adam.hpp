#ifndef HANDMOTION_NN_ADAM_HPP_
#define HANDMOTION_NN_ADAM_HPP_

#include <cstdint>
#include <vector>

#include "handmotion/nn/tensor.hpp"

namespace handmotion::nn {

struct AdamConfig {
  double lr = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

// Adaptive-moment optimizer with bias correction. Moment buffers are sized
// lazily against the store on the first step.
class Adam {
 public:
  explicit Adam(AdamConfig config = {}) : config_(config) {}

  // Applies one update from the accumulated gradients, then zeroes them.
  void step(ParamStore& params);

  std::uint64_t step_count() const { return steps_; }
  const AdamConfig& config() const { return config_; }
  void set_lr(double lr) { config_.lr = lr; }

 private:
  AdamConfig config_;
  std::uint64_t steps_ = 0;
  std::vector<std::vector<double>> m_;
  std::vector<std::vector<double>> v_;
};

}  // namespace handmotion::nn

#endif  // HANDMOTION_NN_ADAM_HPP_
