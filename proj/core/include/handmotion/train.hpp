#ifndef HANDMOTION_TRAIN_HPP_
#define HANDMOTION_TRAIN_HPP_

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "handmotion/augment.hpp"
#include "handmotion/features.hpp"
#include "handmotion/model.hpp"
#include "handmotion/skeleton.hpp"

namespace handmotion {

enum class Regime { kIntra, kCross };

std::string_view regime_name(Regime regime);
Regime regime_from_name(std::string_view name);

// Labeled, simplified sequences with a dense label index.
struct Dataset {
  std::vector<MotionSequence> sequences;
  std::vector<std::size_t> labels;
  std::vector<std::string> class_names;  // sorted

  // Simplifies every sequence with `map`; throws DatasetError on unlabeled
  // sequences.
  static Dataset from_sequences(const std::vector<MotionSequence>& raw,
                                const JointMap& map);
  std::size_t size() const { return sequences.size(); }
  std::size_t class_count() const { return class_names.size(); }
  // Sequence indices per class.
  std::vector<std::vector<std::size_t>> by_class() const;
};

struct BatchEntry {
  FeatureMatrix features;
  std::size_t label = 0;
  std::size_t source = 0;  // index into the dataset
  std::size_t copy = 0;    // 0, 1, 2 for the three augmented copies
  Rotation rotation = Rotation::Identity();
};

struct Batch {
  std::vector<BatchEntry> entries;

  std::vector<std::size_t> labels() const;
  // Throws StateError unless every label present has exactly
  // `samples_per_category` sources, each appearing `copies` times.
  void check_invariants(std::size_t samples_per_category,
                        std::size_t copies) const;
};

inline constexpr std::size_t kSamplesPerCategory = 2;
inline constexpr std::size_t kCopiesPerSample = 3;

// Two distinct sources per category, three independently augmented copies
// each. The cross regime adds an independent uniform rotation per copy.
// Throws DatasetError naming the categories with fewer than two samples.
Batch build_batch(const Dataset& dataset, Regime regime,
                  const AugmentConfig& augment, Rng& rng);

struct TrainConfig {
  double temperature = 0.07;
  std::size_t epochs = 100;
  double learning_rate = 1e-3;
  std::uint64_t seed = 0;
  Regime regime = Regime::kIntra;
  AugmentConfig augment;
  // Intra regime: stop once accuracy on the unaugmented training set
  // reaches this value (checked every `eval_every` epochs).
  std::optional<double> target_accuracy;
  std::size_t eval_every = 5;
  // Stop after this many epochs without a new best loss (0 = never).
  std::size_t patience = 0;
  // Best-loss checkpoint written here when set.
  std::filesystem::path checkpoint_path;
  // Diagnostic dump written here when training diverges.
  std::filesystem::path diagnostic_path;

  void validate() const;
};

struct EpochRecord {
  std::size_t epoch = 0;  // 1-based
  double loss = 0.0;
  double wall_seconds = 0.0;  // since the start of fit
  std::optional<double> accuracy;
};

std::string to_log_line(const EpochRecord& record);

struct FitResult {
  ModelParams model;  // parameters when training stopped
  ModelParams best;   // lowest epoch loss
  std::vector<EpochRecord> log;
  bool stopped_early = false;
};

using EpochCallback = std::function<void(const EpochRecord&)>;

// Trains `initial` in place of a fresh model. The intra regime minimizes
// cross-entropy through the linear head; the cross regime minimizes NT-Xent
// on summary descriptors. Throws NumericalError (after writing the
// diagnostic dump) on a non-finite loss.
FitResult fit(const Dataset& dataset, const TrainConfig& config,
              ModelParams initial, const EpochCallback& on_epoch = {});
// Builds the model from `model_config` (class names taken from the dataset
// for the intra regime) seeded by config.seed.
FitResult fit(const Dataset& dataset, const TrainConfig& config,
              ModelConfig model_config, const EpochCallback& on_epoch = {});

// Argmax accuracy of the linear head on unaugmented sequences.
double linear_accuracy(const ModelParams& model, const Dataset& dataset);

}  // namespace handmotion

#endif  // HANDMOTION_TRAIN_HPP_
