#include "handmotion/features.hpp"

#include <cmath>
#include <istream>
#include <numbers>
#include <ostream>
#include <sstream>

#include "handmotion/errors.hpp"
#include "text_util.hpp"

namespace handmotion {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kTwoPi = 2.0 * std::numbers::pi;

void require_simplified(const MotionSequence& seq) {
  seq.validate_for_features();
  if (!seq.frames.front().is_simplified()) {
    throw LayoutMismatchError(
        "feature extraction needs simplified skeletons; got format '" +
        seq.frames.front().format_id() + "'");
  }
}

}  // namespace

BoneAngles bone_angles(const Point3& bone) {
  BoneAngles out;
  if (bone.squaredNorm() == 0.0) {
    out.degenerate = true;
    return out;
  }
  out.azimuth = std::atan2(bone.y(), bone.x());
  out.elevation = std::atan2(bone.z(), std::hypot(bone.x(), bone.y()));
  return out;
}

std::array<BoneAngles, kBoneCount> bone_angles(const HandSkeleton& skeleton) {
  std::array<BoneAngles, kBoneCount> out;
  for (std::size_t b = 0; b < kBoneCount; ++b) {
    const auto& [from, to] = kBones[b];
    out[b] = bone_angles(Point3(skeleton.role(to) - skeleton.role(from)));
  }
  return out;
}

double wrap_angle(double d) {
  double r = std::fmod(d + kPi, kTwoPi);
  if (r < 0.0) r += kTwoPi;
  r -= kPi;
  // fmod lands on -pi for odd multiples of pi; the range is (-pi, pi].
  if (r <= -kPi) r = kPi;
  return r;
}

std::vector<std::array<double, kCoordBlock>> coord_diffs(
    const std::vector<HandSkeleton>& frames) {
  std::vector<std::array<double, kCoordBlock>> out(frames.size());
  if (frames.empty()) return out;
  out[0].fill(0.0);
  for (std::size_t t = 1; t < frames.size(); ++t) {
    for (std::size_t j = 0; j < kSimplifiedJointCount; ++j) {
      const Point3 d = frames[t].joint(j) - frames[t - 1].joint(j);
      for (int a = 0; a < 3; ++a) out[t][3 * j + a] = d[a];
    }
  }
  return out;
}

std::vector<std::array<double, kAngleBlock>> angle_diffs(
    const std::vector<HandSkeleton>& frames) {
  std::vector<std::array<double, kAngleBlock>> out(frames.size());
  if (frames.empty()) return out;
  out[0].fill(0.0);
  auto prev = bone_angles(frames[0]);
  for (std::size_t t = 1; t < frames.size(); ++t) {
    const auto cur = bone_angles(frames[t]);
    for (std::size_t b = 0; b < kBoneCount; ++b) {
      if (cur[b].degenerate || prev[b].degenerate) {
        out[t][2 * b] = 0.0;
        out[t][2 * b + 1] = 0.0;
        continue;
      }
      out[t][2 * b] = wrap_angle(cur[b].elevation - prev[b].elevation);
      out[t][2 * b + 1] = wrap_angle(cur[b].azimuth - prev[b].azimuth);
    }
    prev = cur;
  }
  return out;
}

PoseFeatureFrame frame_features(const HandSkeleton* previous,
                                const HandSkeleton& current) {
  PoseFeatureFrame out{};
  const auto standardized = standardize(current);
  for (std::size_t j = 0; j < kSimplifiedJointCount; ++j) {
    for (int a = 0; a < 3; ++a) out[3 * j + a] = standardized.joint(j)[a];
  }
  if (!previous) return out;
  if (!previous->is_simplified()) {
    throw LayoutMismatchError("previous frame is not simplified");
  }
  // Coordinate differences are taken on raw joints and divided by the
  // current frame's palm length: scale-normalized, not translated, and
  // exactly invariant to constant offsets.
  const double palm = current.palm_length();
  for (std::size_t j = 0; j < kSimplifiedJointCount; ++j) {
    const Point3 d = current.joint(j) - previous->joint(j);
    for (int a = 0; a < 3; ++a) out[kCoordBlock + 3 * j + a] = d[a] / palm;
  }
  const auto prev = bone_angles(*previous);
  const auto cur = bone_angles(current);
  for (std::size_t b = 0; b < kBoneCount; ++b) {
    if (cur[b].degenerate || prev[b].degenerate) continue;
    out[2 * kCoordBlock + 2 * b] =
        wrap_angle(cur[b].elevation - prev[b].elevation);
    out[2 * kCoordBlock + 2 * b + 1] =
        wrap_angle(cur[b].azimuth - prev[b].azimuth);
  }
  return out;
}

std::vector<PoseFeatureFrame> extract_features(const MotionSequence& seq) {
  require_simplified(seq);
  std::vector<PoseFeatureFrame> out;
  out.reserve(seq.frames.size());
  for (std::size_t t = 0; t < seq.frames.size(); ++t) {
    out.push_back(
        frame_features(t == 0 ? nullptr : &seq.frames[t - 1], seq.frames[t]));
  }
  return out;
}

std::vector<PoseFeatureFrame> extract_features(const MotionSequence& seq,
                                               const JointMap& map) {
  if (!seq.frames.empty() && seq.frames.front().is_simplified() &&
      map.format_id() == kSimplifiedFormat) {
    return extract_features(seq);
  }
  return extract_features(simplify(seq, map));
}

FeatureMatrix to_matrix(const std::vector<PoseFeatureFrame>& frames) {
  FeatureMatrix m(static_cast<Eigen::Index>(frames.size()),
                  static_cast<Eigen::Index>(kFeatureDim));
  for (std::size_t t = 0; t < frames.size(); ++t) {
    for (std::size_t i = 0; i < kFeatureDim; ++i) {
      m(static_cast<Eigen::Index>(t), static_cast<Eigen::Index>(i)) =
          frames[t][i];
    }
  }
  return m;
}

void write_pff(std::ostream& out, const std::vector<PoseFeatureFrame>& frames) {
  out << "pff v1 dim=" << kFeatureDim << '\n';
  for (const auto& f : frames) {
    for (std::size_t i = 0; i < kFeatureDim; ++i) {
      if (i) out << ' ';
      out << detail::format_double(f[i]);
    }
    out << '\n';
  }
}

std::vector<PoseFeatureFrame> read_pff(std::istream& in) {
  std::string header;
  if (!std::getline(in, header) ||
      detail::trim(header) != "pff v1 dim=" + std::to_string(kFeatureDim)) {
    throw ParseError("bad .pff header: '" + header + "'");
  }
  std::vector<PoseFeatureFrame> out;
  std::vector<double> values;
  std::string line;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (detail::trim(line).empty()) continue;
    if (!detail::parse_doubles(line, values) || values.size() != kFeatureDim) {
      throw ParseError(".pff line " + std::to_string(line_no) +
                       ": expected " + std::to_string(kFeatureDim) + " floats");
    }
    PoseFeatureFrame f;
    std::copy(values.begin(), values.end(), f.begin());
    out.push_back(f);
  }
  return out;
}

}  // namespace handmotion
