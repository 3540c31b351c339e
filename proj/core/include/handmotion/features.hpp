#ifndef HANDMOTION_FEATURES_HPP_
#define HANDMOTION_FEATURES_HPP_

#include <array>
#include <cstddef>
#include <iosfwd>
#include <utility>
#include <vector>

#include <Eigen/Core>

#include "handmotion/skeleton.hpp"

namespace handmotion {

inline constexpr std::size_t kBoneCount = 6;
inline constexpr std::size_t kCoordBlock = 3 * kSimplifiedJointCount;  // 21
inline constexpr std::size_t kAngleBlock = 2 * kBoneCount;             // 12
inline constexpr std::size_t kFeatureDim = 2 * kCoordBlock + kAngleBlock;

// Palm bone first, then palm_top -> each fingertip.
inline constexpr std::array<std::pair<JointRole, JointRole>, kBoneCount>
    kBones = {{{JointRole::kWrist, JointRole::kPalmTop},
               {JointRole::kPalmTop, JointRole::kThumbTip},
               {JointRole::kPalmTop, JointRole::kIndexTip},
               {JointRole::kPalmTop, JointRole::kMiddleTip},
               {JointRole::kPalmTop, JointRole::kRingTip},
               {JointRole::kPalmTop, JointRole::kPinkyTip}}};

struct BoneAngles {
  double elevation = 0.0;  // phi, from the xy-plane
  double azimuth = 0.0;    // theta, in the xy-plane from +x
  bool degenerate = false;  // zero-length bone; both angles forced to 0
};

BoneAngles bone_angles(const Point3& bone);
std::array<BoneAngles, kBoneCount> bone_angles(const HandSkeleton& skeleton);

// Maps an angle difference into (-pi, pi].
double wrap_angle(double d);

// Layout: [relative coords (21) | coord diffs (21) | angle diffs (12)].
using PoseFeatureFrame = std::array<double, kFeatureDim>;

// Row-major [T, 54] feature stream.
using FeatureMatrix =
    Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

// Per-frame x_t - x_{t-1} (21 values), frame 0 zero. Input frames should
// already be scale-normalized.
std::vector<std::array<double, kCoordBlock>> coord_diffs(
    const std::vector<HandSkeleton>& frames);
// Per-frame wrapped (d_phi, d_theta) per bone (12 values), frame 0 zero.
std::vector<std::array<double, kAngleBlock>> angle_diffs(
    const std::vector<HandSkeleton>& frames);

// Features of one simplified frame given its predecessor (nullptr for the
// first frame, whose differences are zero). Streaming and batch extraction
// both go through this.
PoseFeatureFrame frame_features(const HandSkeleton* previous,
                                const HandSkeleton& current);

// Full per-frame features of a simplified (7-joint) sequence.
std::vector<PoseFeatureFrame> extract_features(const MotionSequence& seq);
std::vector<PoseFeatureFrame> extract_features(const MotionSequence& seq,
                                               const JointMap& map);

FeatureMatrix to_matrix(const std::vector<PoseFeatureFrame>& frames);

// ".pff" text: header "pff v1 dim=54", one line of 54 floats per frame.
void write_pff(std::ostream& out, const std::vector<PoseFeatureFrame>& frames);
std::vector<PoseFeatureFrame> read_pff(std::istream& in);

}  // namespace handmotion

#endif  // HANDMOTION_FEATURES_HPP_
