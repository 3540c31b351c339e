#ifndef HANDMOTION_SYNTH_HPP_
#define HANDMOTION_SYNTH_HPP_

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "handmotion/skeleton.hpp"

namespace handmotion {

enum class GestureFamily {
  kSwipeRight,
  kSwipeLeft,
  kSwipeUp,
  kSwipeDown,
  kCircleCw,
  kCircleCcw,
  kPinch,
  kExpand,
  kPointHold,
};

inline constexpr GestureFamily kAllFamilies[] = {
    GestureFamily::kSwipeRight, GestureFamily::kSwipeLeft,
    GestureFamily::kSwipeUp,    GestureFamily::kSwipeDown,
    GestureFamily::kCircleCw,   GestureFamily::kCircleCcw,
    GestureFamily::kPinch,      GestureFamily::kExpand,
    GestureFamily::kPointHold,
};

std::string_view family_name(GestureFamily family);
GestureFamily family_from_name(std::string_view name);

struct GestureSpec {
  GestureFamily family = GestureFamily::kSwipeRight;
  std::size_t duration_min = 30;
  std::size_t duration_max = 60;
  // Trajectory size in palm lengths.
  double amplitude_min = 2.0;
  double amplitude_max = 4.0;
  // Per-coordinate noise in palm lengths.
  double noise_sigma = 0.02;
  std::uint64_t seed = 0;

  void validate() const;
};

// `count` labeled simplified-format sequences. Each has its own palm size,
// placement, slight orientation, duration, amplitude and phase; sample i
// depends only on (seed, family, i).
std::vector<MotionSequence> generate(const GestureSpec& spec,
                                     std::size_t count);

}  // namespace handmotion

#endif  // HANDMOTION_SYNTH_HPP_
