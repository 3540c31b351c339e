#ifndef HANDMOTION_SKELETON_HPP_
#define HANDMOTION_SKELETON_HPP_

#include <array>
#include <cstddef>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Core>

namespace handmotion {

using Point3 = Eigen::Vector3d;

// Roles of the simplified hand. The numeric value is the joint's position in
// a simplified skeleton.
enum class JointRole : int {
  kWrist = 0,
  kPalmTop,
  kThumbTip,
  kIndexTip,
  kMiddleTip,
  kRingTip,
  kPinkyTip,
};

inline constexpr std::size_t kSimplifiedJointCount = 7;
inline constexpr std::string_view kSimplifiedFormat = "simplified7";

// Palm lengths below this (in the sequence's native unit) are tracking
// failures, not hands.
inline constexpr double kDegeneratePalmLength = 1e-6;

inline constexpr std::array<JointRole, kSimplifiedJointCount> kAllRoles = {
    JointRole::kWrist,     JointRole::kPalmTop,  JointRole::kThumbTip,
    JointRole::kIndexTip,  JointRole::kMiddleTip, JointRole::kRingTip,
    JointRole::kPinkyTip};

std::string_view role_name(JointRole role);
std::optional<JointRole> role_from_name(std::string_view name);

// One frame of joint coordinates. Immutable after construction.
class HandSkeleton {
 public:
  HandSkeleton() = default;
  // Throws DataError on non-finite coordinates, LayoutMismatchError when
  // format_id is the simplified format and the joint count is not 7.
  HandSkeleton(std::vector<Point3> joints, std::string format_id);

  const std::vector<Point3>& joints() const { return joints_; }
  const Point3& joint(std::size_t index) const { return joints_.at(index); }
  std::size_t size() const { return joints_.size(); }
  const std::string& format_id() const { return format_id_; }
  bool is_simplified() const { return format_id_ == kSimplifiedFormat; }

  // Only valid on simplified skeletons.
  const Point3& role(JointRole r) const;
  double palm_length() const;

 private:
  std::vector<Point3> joints_;
  std::string format_id_;
};

// Maps the seven roles onto a source layout. A role bound to several source
// joints resolves to their centroid.
class JointMap {
 public:
  JointMap(std::string format_id, std::size_t source_joint_count,
           std::array<std::vector<std::size_t>, kSimplifiedJointCount> roles);

  // Map for skeletons that are already in the simplified layout.
  static JointMap identity();

  const std::string& format_id() const { return format_id_; }
  std::size_t source_joint_count() const { return source_joint_count_; }
  const std::vector<std::size_t>& sources(JointRole role) const {
    return roles_[static_cast<std::size_t>(role)];
  }

 private:
  std::string format_id_;
  std::size_t source_joint_count_;
  std::array<std::vector<std::size_t>, kSimplifiedJointCount> roles_;
};

// Text format, one directive per line, '#' comments:
//   format shrec22
//   joints 22
//   wrist 0
//   palm_top 6 10 14 18
//   ...
JointMap parse_joint_map(std::istream& in);
JointMap load_joint_map(const std::string& path);
// Resolves a bare name ("fphab21") against the shipped jointmaps directory;
// anything containing a path separator or ".jmap" is loaded as a file.
JointMap resolve_joint_map(const std::string& name_or_path);
std::string default_data_dir();

struct MotionSequence {
  std::vector<HandSkeleton> frames;
  std::optional<std::string> label;
  std::optional<std::string> source_id;

  std::size_t length() const { return frames.size(); }
  std::size_t joint_count() const {
    return frames.empty() ? 0 : frames.front().size();
  }
  // Checks the shared-format invariant; throws LayoutMismatchError.
  void validate() const;
  // validate() plus the two-frame minimum needed for temporal differences.
  void validate_for_features() const;
};

HandSkeleton simplify(const HandSkeleton& skeleton, const JointMap& map);
MotionSequence simplify(const MotionSequence& seq, const JointMap& map);

// Divides every joint by the palm length. Throws DegenerateSkeletonError.
HandSkeleton scale_normalize(const HandSkeleton& skeleton);
// Scale normalization followed by moving palm_top to the origin.
HandSkeleton standardize(const HandSkeleton& skeleton);

}  // namespace handmotion

#endif  // HANDMOTION_SKELETON_HPP_
