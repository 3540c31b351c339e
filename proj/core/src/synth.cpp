#include "handmotion/synth.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <random>

#include "handmotion/augment.hpp"
#include "handmotion/errors.hpp"

namespace handmotion {

namespace {

constexpr double kPi = std::numbers::pi;

struct Finger {
  Point3 direction;  // unit, hand frame
  double length;     // palm lengths
};

// Thumb, index, middle, ring, pinky. Tips sit slightly in front of the palm
// plane (-z) so the hand is not mirror symmetric.
std::array<Finger, 5> open_hand() {
  const std::array<Point3, 5> dirs = {
      Point3(0.9, -0.3, -0.25), Point3(0.3, 1.0, -0.15),
      Point3(0.0, 1.0, -0.15),  Point3(-0.25, 1.0, -0.15),
      Point3(-0.5, 0.9, -0.15)};
  const std::array<double, 5> lengths = {0.7, 0.85, 0.9, 0.85, 0.7};
  std::array<Finger, 5> out;
  for (std::size_t i = 0; i < 5; ++i) {
    out[i] = {dirs[i].normalized(), lengths[i]};
  }
  return out;
}

double smoothstep(double s) { return s * s * (3.0 - 2.0 * s); }

Point3 blend_direction(const Point3& a, const Point3& b, double c) {
  return ((1.0 - c) * a + c * b).normalized();
}

struct HandState {
  Point3 offset = Point3::Zero();   // palm lengths, hand frame
  std::array<double, 5> reach{1.0, 1.0, 1.0, 1.0, 1.0};
  double converge = 0.0;            // 0 open fan, 1 tips gathered
};

HandState pose_at(GestureFamily family, double s, double amplitude,
                  double phase) {
  HandState h;
  switch (family) {
    case GestureFamily::kSwipeRight:
    case GestureFamily::kSwipeLeft:
    case GestureFamily::kSwipeUp:
    case GestureFamily::kSwipeDown: {
      const double e = phase + (1.0 - phase) * smoothstep(s);
      const double d = amplitude * e;
      if (family == GestureFamily::kSwipeRight) h.offset.x() = d;
      if (family == GestureFamily::kSwipeLeft) h.offset.x() = -d;
      if (family == GestureFamily::kSwipeUp) h.offset.y() = d;
      if (family == GestureFamily::kSwipeDown) h.offset.y() = -d;
      break;
    }
    case GestureFamily::kCircleCw:
    case GestureFamily::kCircleCcw: {
      const double sign = family == GestureFamily::kCircleCcw ? 1.0 : -1.0;
      const double a = 2.0 * kPi * phase + sign * 2.0 * kPi * s;
      const double r = 0.5 * amplitude;
      h.offset.x() = r * std::cos(a);
      h.offset.y() = r * std::sin(a);
      break;
    }
    case GestureFamily::kPinch:
    case GestureFamily::kExpand: {
      const double c = smoothstep(s);
      const double closed = family == GestureFamily::kPinch ? c : 1.0 - c;
      h.reach.fill(1.0 - 0.65 * closed);
      h.converge = closed;
      break;
    }
    case GestureFamily::kPointHold: {
      const double c = smoothstep(std::min(1.0, 2.0 * s));
      h.reach.fill(1.0 - 0.65 * c);
      h.reach[1] = 1.0;
      // Slight push toward the pointed-at target.
      h.offset.z() = -0.1 * amplitude * smoothstep(s);
      break;
    }
  }
  return h;
}

}  // namespace

std::string_view family_name(GestureFamily family) {
  switch (family) {
    case GestureFamily::kSwipeRight: return "swipe-right";
    case GestureFamily::kSwipeLeft: return "swipe-left";
    case GestureFamily::kSwipeUp: return "swipe-up";
    case GestureFamily::kSwipeDown: return "swipe-down";
    case GestureFamily::kCircleCw: return "circle-cw";
    case GestureFamily::kCircleCcw: return "circle-ccw";
    case GestureFamily::kPinch: return "pinch";
    case GestureFamily::kExpand: return "expand";
    case GestureFamily::kPointHold: return "point-hold";
  }
  return "?";
}

GestureFamily family_from_name(std::string_view name) {
  for (auto f : kAllFamilies) {
    if (family_name(f) == name) return f;
  }
  throw UsageError("unknown gesture family '" + std::string(name) + "'");
}

void GestureSpec::validate() const {
  if (duration_min < 6) throw UsageError("synth: duration must be >= 6");
  if (duration_max < duration_min) {
    throw UsageError("synth: duration_max < duration_min");
  }
  if (!(amplitude_min > 0.0) || !(amplitude_max >= amplitude_min) ||
      !std::isfinite(amplitude_max)) {
    throw UsageError("synth: amplitude range must satisfy 0 < min <= max");
  }
  if (!(noise_sigma >= 0.0) || !std::isfinite(noise_sigma)) {
    throw UsageError("synth: noise sigma must be >= 0");
  }
}

std::vector<MotionSequence> generate(const GestureSpec& spec,
                                     std::size_t count) {
  spec.validate();
  if (count < 1) throw UsageError("synth: count must be >= 1");
  const auto fingers = open_hand();
  const Point3 gathered = Point3(0.15, 0.8, -0.6).normalized();
  const auto family_index = static_cast<std::uint64_t>(spec.family);

  std::vector<MotionSequence> out;
  out.reserve(count);
  for (std::size_t n = 0; n < count; ++n) {
    Rng rng = derive_rng(spec.seed, family_index, n);
    std::uniform_int_distribution<std::size_t> duration(spec.duration_min,
                                                        spec.duration_max);
    std::uniform_real_distribution<double> amplitude(spec.amplitude_min,
                                                     spec.amplitude_max);
    std::uniform_real_distribution<double> palm(0.08, 0.11);
    std::uniform_real_distribution<double> place(-0.3, 0.3);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::normal_distribution<double> noise(0.0, 1.0);

    const std::size_t frames = duration(rng);
    const double amp = amplitude(rng);
    const double palm_length = palm(rng);
    const Point3 origin(place(rng), place(rng), 0.5 + place(rng));
    const double phase =
        (spec.family == GestureFamily::kCircleCw ||
         spec.family == GestureFamily::kCircleCcw)
            ? unit(rng)
            : 0.2 * unit(rng);
    const Rotation orient = sample_small_rotation(15.0 * kPi / 180.0, rng);
    const double sigma = spec.noise_sigma * palm_length;

    MotionSequence seq;
    seq.label = std::string(family_name(spec.family));
    seq.source_id = seq.label.value() + "_" + std::to_string(spec.seed) +
                    "_" + std::to_string(n);
    seq.frames.reserve(frames);
    for (std::size_t t = 0; t < frames; ++t) {
      const double s =
          static_cast<double>(t) / static_cast<double>(frames - 1);
      const HandState h = pose_at(spec.family, s, amp, phase);
      std::vector<Point3> joints(kSimplifiedJointCount);
      const Point3 base = h.offset;
      joints[0] = base;
      joints[1] = base + Point3(0.0, 1.0, 0.0);
      for (std::size_t f = 0; f < 5; ++f) {
        const Point3 dir =
            blend_direction(fingers[f].direction, gathered, h.converge);
        joints[2 + f] = joints[1] + h.reach[f] * fingers[f].length * dir;
      }
      for (auto& j : joints) {
        j = origin + orient * (palm_length * j);
        if (sigma > 0.0) {
          for (int a = 0; a < 3; ++a) j[a] += sigma * noise(rng);
        }
      }
      seq.frames.emplace_back(std::move(joints),
                              std::string(kSimplifiedFormat));
    }
    out.push_back(std::move(seq));
  }
  return out;
}

}  // namespace handmotion
