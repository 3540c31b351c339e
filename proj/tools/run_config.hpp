#ifndef HANDMOTION_TOOLS_RUN_CONFIG_HPP_
#define HANDMOTION_TOOLS_RUN_CONFIG_HPP_

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "handmotion/config.hpp"
#include "handmotion/model.hpp"
#include "handmotion/skeleton.hpp"
#include "handmotion/train.hpp"

namespace handmotion::tools {

// How a corpus is divided into training and held-out parts.
struct SplitSpec {
  enum class Mode { kNone, kRatio, kLeaveOneSubjectOut };
  Mode mode = Mode::kNone;
  // "train:test", e.g. 1:3, 1:1, 3:1.
  double train_parts = 1.0;
  double test_parts = 1.0;
  // Leave-one-subject-out: the subject is the `subject_token`-th piece of the
  // source id split on '_' and '/'; sequences of `holdout` are held out.
  std::size_t subject_token = 0;
  std::string holdout;

  void validate() const;
};

struct RunConfig {
  std::filesystem::path dataset;
  std::filesystem::path checkpoint;
  std::filesystem::path output_dir;
  std::string joint_map = "simplified7";
  ModelConfig model;
  TrainConfig train;
  SplitSpec split;
  std::size_t eval_k = 0;  // 0 sweeps the default k values
  std::size_t reference_multiplier = 1;

  // Throws UsageError on unknown keys, bad values, or missing files.
  static RunConfig from_key_values(const KeyValueConfig& kv,
                                   const std::filesystem::path& base_dir);
  static RunConfig load(const std::filesystem::path& path);
  JointMap resolved_joint_map() const;
};

struct CorpusSplit {
  std::vector<MotionSequence> train;
  std::vector<MotionSequence> test;
};

// Stratified per label and deterministic given `seed`.
CorpusSplit split_corpus(const std::vector<MotionSequence>& corpus,
                         const SplitSpec& spec, std::uint64_t seed);

}  // namespace handmotion::tools

#endif  // HANDMOTION_TOOLS_RUN_CONFIG_HPP_
