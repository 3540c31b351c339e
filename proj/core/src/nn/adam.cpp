#include "handmotion/nn/adam.hpp"

#include <cmath>

#include "handmotion/errors.hpp"

namespace handmotion::nn {

void Adam::step(ParamStore& params) {
  auto& entries = params.entries();
  if (m_.empty()) {
    m_.resize(entries.size());
    v_.resize(entries.size());
    for (std::size_t p = 0; p < entries.size(); ++p) {
      m_[p].assign(entries[p].value.size(), 0.0);
      v_[p].assign(entries[p].value.size(), 0.0);
    }
  } else if (m_.size() != entries.size()) {
    throw StateError("Adam: parameter store changed between steps");
  }
  ++steps_;
  const double t = static_cast<double>(steps_);
  const double bc1 = 1.0 - std::pow(config_.beta1, t);
  const double bc2 = 1.0 - std::pow(config_.beta2, t);
  for (std::size_t p = 0; p < entries.size(); ++p) {
    Tensor& value = entries[p].value;
    Tensor& grad = entries[p].grad;
    auto& m = m_[p];
    auto& v = v_[p];
    for (std::size_t i = 0; i < value.size(); ++i) {
      const double g = grad[i];
      m[i] = config_.beta1 * m[i] + (1.0 - config_.beta1) * g;
      v[i] = config_.beta2 * v[i] + (1.0 - config_.beta2) * g * g;
      const double m_hat = m[i] / bc1;
      const double v_hat = v[i] / bc2;
      value[i] -= config_.lr * m_hat / (std::sqrt(v_hat) + config_.eps);
    }
    grad.fill(0.0);
  }
}

}  // namespace handmotion::nn
