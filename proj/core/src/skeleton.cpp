#include "handmotion/skeleton.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "handmotion/errors.hpp"

namespace handmotion {

namespace {

constexpr std::array<std::string_view, kSimplifiedJointCount> kRoleNames = {
    "wrist",      "palm_top", "thumb_tip", "index_tip",
    "middle_tip", "ring_tip", "pinky_tip"};

}  // namespace

std::string_view role_name(JointRole role) {
  return kRoleNames[static_cast<std::size_t>(role)];
}

std::optional<JointRole> role_from_name(std::string_view name) {
  for (std::size_t i = 0; i < kRoleNames.size(); ++i) {
    if (kRoleNames[i] == name) return static_cast<JointRole>(i);
  }
  return std::nullopt;
}

HandSkeleton::HandSkeleton(std::vector<Point3> joints, std::string format_id)
    : joints_(std::move(joints)), format_id_(std::move(format_id)) {
  for (std::size_t j = 0; j < joints_.size(); ++j) {
    if (!joints_[j].allFinite()) {
      throw DataError("non-finite coordinate in joint " + std::to_string(j));
    }
  }
  if (is_simplified() && joints_.size() != kSimplifiedJointCount) {
    throw LayoutMismatchError(
        shape_message("simplified skeleton joint count",
                      kSimplifiedJointCount, joints_.size()));
  }
}

const Point3& HandSkeleton::role(JointRole r) const {
  if (!is_simplified()) {
    throw LayoutMismatchError("role lookup on non-simplified skeleton '" +
                              format_id_ + "'");
  }
  return joints_[static_cast<std::size_t>(r)];
}

double HandSkeleton::palm_length() const {
  return (role(JointRole::kPalmTop) - role(JointRole::kWrist)).norm();
}

JointMap::JointMap(
    std::string format_id, std::size_t source_joint_count,
    std::array<std::vector<std::size_t>, kSimplifiedJointCount> roles)
    : format_id_(std::move(format_id)),
      source_joint_count_(source_joint_count),
      roles_(std::move(roles)) {
  for (std::size_t r = 0; r < roles_.size(); ++r) {
    const auto name = std::string(role_name(static_cast<JointRole>(r)));
    if (roles_[r].empty()) {
      throw LayoutMismatchError("joint map '" + format_id_ +
                                "' leaves role " + name + " unassigned");
    }
    for (std::size_t idx : roles_[r]) {
      if (idx >= source_joint_count_) {
        throw LayoutMismatchError(
            "joint map '" + format_id_ + "': role " + name + " index " +
            std::to_string(idx) + " out of range for " +
            std::to_string(source_joint_count_) + " joints");
      }
    }
  }
  if (roles_[0] == roles_[1]) {
    throw LayoutMismatchError("joint map '" + format_id_ +
                              "': wrist and palm_top resolve to the same joints");
  }
}

JointMap JointMap::identity() {
  std::array<std::vector<std::size_t>, kSimplifiedJointCount> roles;
  for (std::size_t r = 0; r < roles.size(); ++r) roles[r] = {r};
  return JointMap(std::string(kSimplifiedFormat), kSimplifiedJointCount,
                  std::move(roles));
}

JointMap parse_joint_map(std::istream& in) {
  std::string format_id;
  std::optional<std::size_t> joint_count;
  std::array<std::vector<std::size_t>, kSimplifiedJointCount> roles;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (auto hash = line.find('#'); hash != std::string::npos) {
      line.erase(hash);
    }
    std::istringstream fields(line);
    std::string key;
    if (!(fields >> key)) continue;
    auto fail = [&](const std::string& why) {
      return ParseError("joint map line " + std::to_string(line_no) + ": " +
                        why);
    };
    if (key == "format") {
      if (!(fields >> format_id)) throw fail("missing format id");
    } else if (key == "joints") {
      std::size_t n = 0;
      if (!(fields >> n) || n == 0) throw fail("bad joint count");
      joint_count = n;
    } else if (auto role = role_from_name(key)) {
      auto& slot = roles[static_cast<std::size_t>(*role)];
      long long idx = 0;
      while (fields >> idx) {
        if (idx < 0) throw fail("negative joint index");
        slot.push_back(static_cast<std::size_t>(idx));
      }
      if (!fields.eof()) throw fail("non-integer joint index");
      if (slot.empty()) throw fail("role " + key + " has no indices");
    } else {
      throw fail("unknown directive '" + key + "'");
    }
  }
  if (format_id.empty()) throw ParseError("joint map: missing 'format'");
  if (!joint_count) throw ParseError("joint map: missing 'joints'");
  return JointMap(format_id, *joint_count, std::move(roles));
}

JointMap load_joint_map(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open joint map " + path);
  return parse_joint_map(in);
}

std::string default_data_dir() {
  if (const char* env = std::getenv("HANDMOTION_DATA_DIR")) return env;
#ifdef HANDMOTION_DATA_DIR
  return HANDMOTION_DATA_DIR;
#else
  return "data";
#endif
}

JointMap resolve_joint_map(const std::string& name_or_path) {
  if (name_or_path == kSimplifiedFormat) return JointMap::identity();
  const bool looks_like_path =
      name_or_path.find('/') != std::string::npos ||
      name_or_path.ends_with(".jmap");
  if (looks_like_path) return load_joint_map(name_or_path);
  const auto path = std::filesystem::path(default_data_dir()) / "jointmaps" /
                    (name_or_path + ".jmap");
  return load_joint_map(path.string());
}

void MotionSequence::validate() const {
  if (frames.empty()) return;
  const auto& fmt = frames.front().format_id();
  const auto count = frames.front().size();
  for (std::size_t t = 1; t < frames.size(); ++t) {
    if (frames[t].format_id() != fmt || frames[t].size() != count) {
      throw LayoutMismatchError("frame " + std::to_string(t) +
                                " has a different joint layout");
    }
  }
}

void MotionSequence::validate_for_features() const {
  validate();
  if (frames.size() < 2) {
    throw TooShortError(
        shape_message("sequence frame count (minimum)", 2, frames.size()));
  }
}

HandSkeleton simplify(const HandSkeleton& skeleton, const JointMap& map) {
  if (skeleton.size() != map.source_joint_count()) {
    throw LayoutMismatchError(
        shape_message("joint count for map '" + map.format_id() + "'",
                      map.source_joint_count(), skeleton.size()));
  }
  std::vector<Point3> out;
  out.reserve(kSimplifiedJointCount);
  for (JointRole role : kAllRoles) {
    const auto& src = map.sources(role);
    if (src.size() == 1) {
      out.push_back(skeleton.joint(src.front()));
      continue;
    }
    Point3 sum = Point3::Zero();
    for (std::size_t idx : src) sum += skeleton.joint(idx);
    out.push_back(sum / static_cast<double>(src.size()));
  }
  return HandSkeleton(std::move(out), std::string(kSimplifiedFormat));
}

MotionSequence simplify(const MotionSequence& seq, const JointMap& map) {
  MotionSequence out;
  out.label = seq.label;
  out.source_id = seq.source_id;
  out.frames.reserve(seq.frames.size());
  for (const auto& frame : seq.frames) out.frames.push_back(simplify(frame, map));
  return out;
}

namespace {

double checked_palm_length(const HandSkeleton& skeleton) {
  const double palm = skeleton.palm_length();
  if (!(palm >= kDegeneratePalmLength)) {
    std::ostringstream msg;
    msg << "degenerate skeleton: palm length " << palm << " below "
        << kDegeneratePalmLength;
    throw DegenerateSkeletonError(msg.str());
  }
  return palm;
}

}  // namespace

HandSkeleton scale_normalize(const HandSkeleton& skeleton) {
  const double palm = checked_palm_length(skeleton);
  std::vector<Point3> out;
  out.reserve(skeleton.size());
  for (const auto& j : skeleton.joints()) out.push_back(j / palm);
  return HandSkeleton(std::move(out), skeleton.format_id());
}

HandSkeleton standardize(const HandSkeleton& skeleton) {
  const double palm = checked_palm_length(skeleton);
  const Point3 origin = skeleton.role(JointRole::kPalmTop) / palm;
  std::vector<Point3> out;
  out.reserve(skeleton.size());
  for (const auto& j : skeleton.joints()) out.push_back(j / palm - origin);
  return HandSkeleton(std::move(out), skeleton.format_id());
}

}  // namespace handmotion
