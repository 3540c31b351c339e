#ifndef HANDMOTION_AUGMENT_HPP_
#define HANDMOTION_AUGMENT_HPP_

#include <cstddef>
#include <cstdint>
#include <numbers>
#include <optional>
#include <random>
#include <vector>

#include <Eigen/Core>

#include "handmotion/skeleton.hpp"

namespace handmotion {

using Rng = std::mt19937_64;
using Rotation = Eigen::Matrix3d;

// Independent stream for (seed, a, b); lets parallel workers produce the
// same samples regardless of scheduling.
Rng derive_rng(std::uint64_t seed, std::uint64_t a, std::uint64_t b = 0);

struct AugmentConfig {
  double speed_min = 0.7;
  double speed_max = 1.3;
  std::size_t skip_stride = 3;
  std::size_t max_len = 32;
  // Standard deviation in palm lengths.
  double coord_noise_sigma = 0.01;
  // Per-axis bound for viewpoint jitter, radians.
  double small_rot_max = 10.0 * std::numbers::pi / 180.0;
  bool full_rotation = false;
  std::uint64_t seed = 0;

  // Throws UsageError on out-of-range values.
  void validate() const;
};

// Linear interpolation at round(T * factor) (minimum 2) evenly spaced
// fractional frame indices; first and last frames are kept exactly.
MotionSequence resample_speed(const MotionSequence& seq, double factor);
// Keeps frames offset, offset + stride, ... Throws TooShortError below two
// frames.
MotionSequence frame_skip(const MotionSequence& seq, std::size_t stride,
                          std::size_t offset);
MotionSequence random_crop(const MotionSequence& seq, std::size_t max_len,
                           Rng& rng);
MotionSequence jitter(const MotionSequence& seq, double sigma, Rng& rng);

// Throws InvalidRotationError unless orthonormal with determinant +1.
void validate_rotation(const Rotation& rotation);
MotionSequence rotate(const MotionSequence& seq, const Rotation& rotation);
// Rz * Ry * Rx with each angle uniform in [-max_angle, max_angle].
Rotation sample_small_rotation(double max_angle, Rng& rng);
// Uniform over SO(3) via a uniform unit quaternion.
Rotation sample_uniform_rotation(Rng& rng);

// Largest skip offset that still leaves two frames; nullopt when even
// offset 0 leaves fewer.
std::optional<std::size_t> max_skip_offset(std::size_t length,
                                           std::size_t stride);

struct AugmentedSample {
  MotionSequence sequence;
  Rotation rotation = Rotation::Identity();  // total rotation applied
};

// Training augmentation: speed variation, frame skipping with a random
// offset, random crop to max_len, coordinate noise, and a small rotation;
// plus a uniform rotation when cfg.full_rotation is set. Output is at the
// model's (skipped) frame rate.
AugmentedSample augment_for_training(const MotionSequence& seq,
                                     const AugmentConfig& cfg, Rng& rng);

// Extends a reference set to multiplier * |refs| sequences. Originals come
// first; copies use speed variation, a crop of max_len * skip_stride raw
// frames, noise, and a small rotation, and stay at the raw frame rate.
std::vector<MotionSequence> augment_reference_set(
    const std::vector<MotionSequence>& refs, std::size_t multiplier,
    const AugmentConfig& cfg, std::uint64_t seed);

// Deterministic inference-time preprocessing: skip with offset 0 (sequences
// shorter than the stride are kept whole).
MotionSequence prepare_for_model(const MotionSequence& seq,
                                 std::size_t stride);

}  // namespace handmotion

#endif  // HANDMOTION_AUGMENT_HPP_
