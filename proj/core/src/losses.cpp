#include "handmotion/losses.hpp"

#include <cmath>
#include <string>

#include "handmotion/errors.hpp"
#include "handmotion/nn/graph.hpp"

namespace handmotion {

double cce_loss(std::span<const double> probs, std::size_t label,
                CceStats* stats) {
  if (label >= probs.size()) {
    throw DimensionError("label " + std::to_string(label) +
                         " out of range for " + std::to_string(probs.size()) +
                         " classes");
  }
  double total = 0.0;
  for (double p : probs) {
    if (!std::isfinite(p) || p < 0.0 || p > 1.0) {
      throw UsageError("probabilities must lie in [0, 1]");
    }
    total += p;
  }
  if (std::abs(total - 1.0) > 1e-6) {
    throw UsageError("probabilities sum to " + std::to_string(total));
  }
  double p = probs[label];
  if (p < kProbabilityFloor) {
    p = kProbabilityFloor;
    if (stats) ++stats->clamped;
  }
  return -std::log(p);
}

double cce_loss(const Eigen::MatrixXd& probs,
                const std::vector<std::size_t>& labels, CceStats* stats) {
  if (static_cast<std::size_t>(probs.rows()) != labels.size()) {
    throw DimensionError(shape_message("labels", probs.rows(), labels.size()));
  }
  if (labels.empty()) throw UsageError("empty batch");
  double sum = 0.0;
  Eigen::VectorXd row(probs.cols());
  for (Eigen::Index i = 0; i < probs.rows(); ++i) {
    row = probs.row(i).transpose();
    sum += cce_loss(std::span<const double>(row.data(), row.size()),
                    labels[i], stats);
  }
  return sum / static_cast<double>(labels.size());
}

double nt_xent_loss(const Eigen::MatrixXd& z,
                    const std::vector<std::size_t>& labels, double tau) {
  const auto rows = static_cast<std::size_t>(z.rows());
  const auto cols = static_cast<std::size_t>(z.cols());
  std::vector<double> data(rows * cols);
  for (std::size_t i = 0; i < rows; ++i) {
    for (std::size_t j = 0; j < cols; ++j) data[i * cols + j] = z(i, j);
  }
  nn::Graph graph;
  const auto v = graph.input(nn::Tensor({rows, cols}, std::move(data)));
  return graph.value(graph.nt_xent(v, labels, tau))[0];
}

}  // namespace handmotion
