#ifndef HANDMOTION_LOSSES_HPP_
#define HANDMOTION_LOSSES_HPP_

#include <cstddef>
#include <span>
#include <vector>

#include <Eigen/Core>

namespace handmotion {

// Counts true-class probabilities that had to be clamped away from zero.
struct CceStats {
  std::size_t clamped = 0;
};

inline constexpr double kProbabilityFloor = 1e-12;

// -log(probs[label]) for a probability vector summing to 1 (within 1e-6).
double cce_loss(std::span<const double> probs, std::size_t label,
                CceStats* stats = nullptr);
// Mean of cce_loss over rows of probs [N, C].
double cce_loss(const Eigen::MatrixXd& probs,
                const std::vector<std::size_t>& labels,
                CceStats* stats = nullptr);

// Contrastive loss over the rows of z; rows with equal labels are positives.
// Mean over all ordered positive pairs of
//   -log(exp(sim_ij / tau) / sum_{k != i} exp(sim_ik / tau)).
double nt_xent_loss(const Eigen::MatrixXd& z,
                    const std::vector<std::size_t>& labels, double tau);

}  // namespace handmotion

#endif  // HANDMOTION_LOSSES_HPP_
