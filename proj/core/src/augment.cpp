#include "handmotion/augment.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/Geometry>

#include "handmotion/errors.hpp"

namespace handmotion {

namespace {

MotionSequence with_frames(const MotionSequence& like,
                           std::vector<HandSkeleton> frames) {
  MotionSequence out;
  out.frames = std::move(frames);
  out.label = like.label;
  out.source_id = like.source_id;
  return out;
}

double mean_palm_length(const MotionSequence& seq) {
  double sum = 0.0;
  for (const auto& f : seq.frames) sum += f.palm_length();
  return sum / static_cast<double>(seq.frames.size());
}

}  // namespace

Rng derive_rng(std::uint64_t seed, std::uint64_t a, std::uint64_t b) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed),
                    static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(a),
                    static_cast<std::uint32_t>(a >> 32),
                    static_cast<std::uint32_t>(b),
                    static_cast<std::uint32_t>(b >> 32)};
  return Rng(seq);
}

void AugmentConfig::validate() const {
  if (!(speed_min > 0.0) || !(speed_max >= speed_min)) {
    throw UsageError("augment: speed range must satisfy 0 < min <= max");
  }
  if (skip_stride < 1) throw UsageError("augment: skip_stride must be >= 1");
  if (max_len < 2) throw UsageError("augment: max_len must be >= 2");
  if (!(coord_noise_sigma >= 0.0)) {
    throw UsageError("augment: coord_noise_sigma must be >= 0");
  }
  if (!(small_rot_max >= 0.0 && small_rot_max <= std::numbers::pi)) {
    throw UsageError("augment: small_rot_max must lie in [0, pi]");
  }
}

MotionSequence resample_speed(const MotionSequence& seq, double factor) {
  if (!(factor > 0.0)) throw UsageError("resample_speed: factor must be > 0");
  seq.validate_for_features();
  const std::size_t n = seq.frames.size();
  const auto out_len = std::max<std::size_t>(
      2, static_cast<std::size_t>(std::llround(static_cast<double>(n) * factor)));
  const std::size_t joints = seq.joint_count();
  const auto& fmt = seq.frames.front().format_id();
  std::vector<HandSkeleton> frames;
  frames.reserve(out_len);
  for (std::size_t i = 0; i < out_len; ++i) {
    const double pos = static_cast<double>(i * (n - 1)) /
                       static_cast<double>(out_len - 1);
    const auto lo = std::min(static_cast<std::size_t>(pos), n - 1);
    const double w = pos - static_cast<double>(lo);
    if (w == 0.0 || lo + 1 >= n) {
      frames.push_back(seq.frames[lo]);
      continue;
    }
    std::vector<Point3> joints_out(joints);
    for (std::size_t j = 0; j < joints; ++j) {
      const Point3& a = seq.frames[lo].joint(j);
      const Point3& b = seq.frames[lo + 1].joint(j);
      joints_out[j] = a + (b - a) * w;
    }
    frames.emplace_back(std::move(joints_out), fmt);
  }
  return with_frames(seq, std::move(frames));
}

MotionSequence frame_skip(const MotionSequence& seq, std::size_t stride,
                          std::size_t offset) {
  if (stride < 1 || offset >= stride) {
    throw UsageError("frame_skip: need 0 <= offset < stride");
  }
  std::vector<HandSkeleton> frames;
  for (std::size_t t = offset; t < seq.frames.size(); t += stride) {
    frames.push_back(seq.frames[t]);
  }
  if (frames.size() < 2) {
    throw TooShortError("frame_skip leaves " + std::to_string(frames.size()) +
                        " frame(s) from " + std::to_string(seq.frames.size()));
  }
  return with_frames(seq, std::move(frames));
}

std::optional<std::size_t> max_skip_offset(std::size_t length,
                                           std::size_t stride) {
  if (length < stride + 1) return std::nullopt;
  return std::min(stride - 1, length - stride - 1);
}

MotionSequence random_crop(const MotionSequence& seq, std::size_t max_len,
                           Rng& rng) {
  if (max_len < 2) throw UsageError("random_crop: max_len must be >= 2");
  if (seq.frames.size() <= max_len) return seq;
  std::uniform_int_distribution<std::size_t> start_dist(
      0, seq.frames.size() - max_len);
  const std::size_t start = start_dist(rng);
  std::vector<HandSkeleton> frames(
      seq.frames.begin() + static_cast<std::ptrdiff_t>(start),
      seq.frames.begin() + static_cast<std::ptrdiff_t>(start + max_len));
  return with_frames(seq, std::move(frames));
}

MotionSequence jitter(const MotionSequence& seq, double sigma, Rng& rng) {
  if (!(sigma >= 0.0)) throw UsageError("jitter: sigma must be >= 0");
  if (sigma == 0.0) return seq;
  std::normal_distribution<double> noise(0.0, sigma);
  std::vector<HandSkeleton> frames;
  frames.reserve(seq.frames.size());
  for (const auto& f : seq.frames) {
    std::vector<Point3> joints = f.joints();
    for (auto& j : joints) {
      for (int a = 0; a < 3; ++a) j[a] += noise(rng);
    }
    frames.emplace_back(std::move(joints), f.format_id());
  }
  return with_frames(seq, std::move(frames));
}

void validate_rotation(const Rotation& rotation) {
  constexpr double kTol = 1e-8;
  if (!rotation.allFinite() ||
      !(rotation.transpose() * rotation).isApprox(Rotation::Identity(), kTol) ||
      std::abs(rotation.determinant() - 1.0) > kTol) {
    throw InvalidRotationError("matrix is not a proper rotation");
  }
}

MotionSequence rotate(const MotionSequence& seq, const Rotation& rotation) {
  validate_rotation(rotation);
  std::vector<HandSkeleton> frames;
  frames.reserve(seq.frames.size());
  for (const auto& f : seq.frames) {
    std::vector<Point3> joints;
    joints.reserve(f.size());
    for (const auto& j : f.joints()) joints.push_back(rotation * j);
    frames.emplace_back(std::move(joints), f.format_id());
  }
  return with_frames(seq, std::move(frames));
}

Rotation sample_small_rotation(double max_angle, Rng& rng) {
  std::uniform_real_distribution<double> angle(-max_angle, max_angle);
  const double ax = angle(rng);
  const double ay = angle(rng);
  const double az = angle(rng);
  using Eigen::AngleAxisd;
  return (AngleAxisd(az, Eigen::Vector3d::UnitZ()) *
          AngleAxisd(ay, Eigen::Vector3d::UnitY()) *
          AngleAxisd(ax, Eigen::Vector3d::UnitX()))
      .toRotationMatrix();
}

Rotation sample_uniform_rotation(Rng& rng) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const double u1 = unit(rng);
  const double u2 = unit(rng);
  const double u3 = unit(rng);
  constexpr double kTwoPi = 2.0 * std::numbers::pi;
  const double a = std::sqrt(1.0 - u1);
  const double b = std::sqrt(u1);
  Eigen::Quaterniond q(b * std::cos(kTwoPi * u3), a * std::sin(kTwoPi * u2),
                       a * std::cos(kTwoPi * u2), b * std::sin(kTwoPi * u3));
  return q.normalized().toRotationMatrix();
}

AugmentedSample augment_for_training(const MotionSequence& seq,
                                     const AugmentConfig& cfg, Rng& rng) {
  cfg.validate();
  std::uniform_real_distribution<double> speed(cfg.speed_min, cfg.speed_max);
  MotionSequence cur = resample_speed(seq, speed(rng));

  if (auto max_offset = max_skip_offset(cur.length(), cfg.skip_stride)) {
    std::uniform_int_distribution<std::size_t> offset(0, *max_offset);
    cur = frame_skip(cur, cfg.skip_stride, offset(rng));
  }
  cur = random_crop(cur, cfg.max_len, rng);

  const double scale = cur.frames.front().is_simplified()
                           ? mean_palm_length(cur)
                           : 1.0;
  cur = jitter(cur, cfg.coord_noise_sigma * scale, rng);

  AugmentedSample out;
  out.rotation = sample_small_rotation(cfg.small_rot_max, rng);
  if (cfg.full_rotation) {
    out.rotation = sample_uniform_rotation(rng) * out.rotation;
  }
  out.sequence = rotate(cur, out.rotation);
  return out;
}

std::vector<MotionSequence> augment_reference_set(
    const std::vector<MotionSequence>& refs, std::size_t multiplier,
    const AugmentConfig& cfg, std::uint64_t seed) {
  if (multiplier < 1) {
    throw UsageError("augment_reference_set: multiplier must be >= 1");
  }
  cfg.validate();
  std::vector<MotionSequence> out = refs;
  out.reserve(refs.size() * multiplier);
  const std::size_t raw_crop = cfg.max_len * cfg.skip_stride;
  for (std::size_t copy = 1; copy < multiplier; ++copy) {
    for (std::size_t i = 0; i < refs.size(); ++i) {
      Rng rng = derive_rng(seed, i, copy);
      std::uniform_real_distribution<double> speed(cfg.speed_min,
                                                   cfg.speed_max);
      MotionSequence cur = resample_speed(refs[i], speed(rng));
      cur = random_crop(cur, raw_crop, rng);
      const double scale = cur.frames.front().is_simplified()
                               ? mean_palm_length(cur)
                               : 1.0;
      cur = jitter(cur, cfg.coord_noise_sigma * scale, rng);
      cur = rotate(cur, sample_small_rotation(cfg.small_rot_max, rng));
      out.push_back(std::move(cur));
    }
  }
  return out;
}

MotionSequence prepare_for_model(const MotionSequence& seq,
                                 std::size_t stride) {
  if (stride <= 1 || seq.frames.size() < stride + 1) return seq;
  return frame_skip(seq, stride, 0);
}

}  // namespace handmotion
