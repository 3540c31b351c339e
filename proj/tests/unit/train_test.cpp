#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <set>

#include "handmotion/errors.hpp"
#include "handmotion/synth.hpp"
#include "handmotion/train.hpp"
#include "test_util.hpp"

namespace handmotion {
namespace {

Dataset random_dataset(std::size_t classes, std::size_t per_class,
                       std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::vector<MotionSequence> raw;
  for (std::size_t c = 0; c < classes; ++c) {
    for (std::size_t i = 0; i < per_class; ++i) {
      auto seq = testing::random_sequence(rng, 40);
      seq.label = "class" + std::to_string(100 + c);
      seq.source_id = *seq.label + "_" + std::to_string(i);
      raw.push_back(std::move(seq));
    }
  }
  return Dataset::from_sequences(raw, JointMap::identity());
}

Dataset synth_dataset(std::size_t per_class, std::uint64_t seed) {
  std::vector<MotionSequence> raw;
  for (auto family : {GestureFamily::kSwipeRight, GestureFamily::kSwipeUp,
                      GestureFamily::kPinch}) {
    GestureSpec spec;
    spec.family = family;
    spec.seed = seed;
    for (auto& s : generate(spec, per_class)) raw.push_back(std::move(s));
  }
  return Dataset::from_sequences(raw, JointMap::identity());
}

// Checkpoints hold float32 values.
std::vector<double> rounded(const std::vector<double>& v) {
  std::vector<double> out;
  for (double x : v) out.push_back(static_cast<float>(x));
  return out;
}

ModelConfig tiny_model() {
  ModelConfig cfg;
  cfg.tcn.channels = 12;
  cfg.summarizer.input_dim = 12;
  cfg.summarizer.reduced_dim = 4;
  return cfg;
}

TEST(Regime, NamesRoundTrip) {
  for (auto r : {Regime::kIntra, Regime::kCross}) {
    EXPECT_EQ(regime_from_name(regime_name(r)), r);
  }
  EXPECT_THROW(regime_from_name("sideways"), UsageError);
}

TEST(Dataset, DenseSortedLabels) {
  const Dataset d = random_dataset(3, 2, 1);
  ASSERT_EQ(d.class_count(), 3u);
  EXPECT_TRUE(std::is_sorted(d.class_names.begin(), d.class_names.end()));
  const auto groups = d.by_class();
  for (std::size_t c = 0; c < 3; ++c) EXPECT_EQ(groups[c].size(), 2u);
}

TEST(Dataset, UnlabeledThrows) {
  std::mt19937_64 rng(2);
  std::vector<MotionSequence> raw = {testing::random_sequence(rng, 10)};
  EXPECT_THROW(Dataset::from_sequences(raw, JointMap::identity()),
               DatasetError);
}

TEST(BuildBatch, TwentyEightCategoriesGive168Entries) {
  const Dataset d = random_dataset(28, 3, 3);
  Rng rng(4);
  const Batch b = build_batch(d, Regime::kIntra, AugmentConfig{}, rng);
  EXPECT_EQ(b.entries.size(), 168u);
  EXPECT_NO_THROW(b.check_invariants(kSamplesPerCategory, kCopiesPerSample));
  for (const auto& e : b.entries) {
    EXPECT_EQ(d.labels[e.source], e.label);
    EXPECT_LE(static_cast<std::size_t>(e.features.rows()), 32u);
    EXPECT_EQ(static_cast<std::size_t>(e.features.cols()), kFeatureDim);
  }
}

TEST(BuildBatch, Deterministic) {
  const Dataset d = random_dataset(4, 3, 5);
  Rng a(6), b(6);
  const Batch x = build_batch(d, Regime::kCross, AugmentConfig{}, a);
  const Batch y = build_batch(d, Regime::kCross, AugmentConfig{}, b);
  ASSERT_EQ(x.entries.size(), y.entries.size());
  for (std::size_t i = 0; i < x.entries.size(); ++i) {
    EXPECT_EQ(x.entries[i].source, y.entries[i].source);
    EXPECT_EQ(x.entries[i].features, y.entries[i].features);
    EXPECT_EQ(x.entries[i].rotation, y.entries[i].rotation);
  }
}

TEST(BuildBatch, CrossRegimeRotatesEachCopyIndependently) {
  const Dataset d = random_dataset(4, 2, 7);
  Rng rng(8);
  const Batch b = build_batch(d, Regime::kCross, AugmentConfig{}, rng);
  for (std::size_t i = 0; i < b.entries.size(); ++i) {
    const Rotation& r = b.entries[i].rotation;
    EXPECT_NO_THROW(validate_rotation(r));
    for (std::size_t j = 0; j < i; ++j) {
      EXPECT_GT((r - b.entries[j].rotation).norm(), 1e-6);
    }
  }
  // Intra rotations stay within the small viewpoint jitter.
  Rng rng2(8);
  const Batch intra = build_batch(d, Regime::kIntra, AugmentConfig{}, rng2);
  for (const auto& e : intra.entries) {
    const double angle = std::acos(std::clamp(
        (e.rotation.trace() - 1.0) / 2.0, -1.0, 1.0));
    EXPECT_LT(angle, 0.6);
  }
}

TEST(BuildBatch, ShortCategoriesAreNamed) {
  std::mt19937_64 rng(9);
  std::vector<MotionSequence> raw;
  for (const char* label : {"alpha", "alpha", "beta", "gamma", "gamma"}) {
    auto s = testing::random_sequence(rng, 20);
    s.label = label;
    raw.push_back(std::move(s));
  }
  const Dataset d = Dataset::from_sequences(raw, JointMap::identity());
  Rng r(1);
  try {
    build_batch(d, Regime::kIntra, AugmentConfig{}, r);
    FAIL() << "expected DatasetError";
  } catch (const DatasetError& e) {
    EXPECT_NE(std::string(e.what()).find("beta"), std::string::npos);
    EXPECT_EQ(std::string(e.what()).find("alpha"), std::string::npos);
  }
}

TEST(BatchInvariants, DetectsBrokenBatch) {
  const Dataset d = random_dataset(2, 2, 10);
  Rng rng(11);
  Batch b = build_batch(d, Regime::kIntra, AugmentConfig{}, rng);
  b.entries.pop_back();
  EXPECT_THROW(b.check_invariants(kSamplesPerCategory, kCopiesPerSample),
               StateError);
}

TEST(TrainConfig, Validation) {
  TrainConfig cfg;
  EXPECT_NO_THROW(cfg.validate());
  cfg.temperature = 0.0;
  EXPECT_THROW(cfg.validate(), UsageError);
  cfg = TrainConfig{};
  cfg.learning_rate = -1.0;
  EXPECT_THROW(cfg.validate(), UsageError);
  cfg = TrainConfig{};
  cfg.target_accuracy = 1.5;
  EXPECT_THROW(cfg.validate(), UsageError);
}

TEST(EpochRecord, LogLine) {
  EpochRecord r;
  r.epoch = 3;
  r.loss = 0.5;
  r.wall_seconds = 1.25;
  EXPECT_EQ(to_log_line(r), "{\"epoch\":3,\"loss\":0.5,\"wall_seconds\":1.25}");
  r.accuracy = 1.0;
  EXPECT_NE(to_log_line(r).find("\"accuracy\":1"), std::string::npos);
}

TEST(Fit, ZeroEpochsReturnsInitialModel) {
  const Dataset d = synth_dataset(3, 1);
  TrainConfig cfg;
  cfg.epochs = 0;
  const FitResult r = fit(d, cfg, tiny_model());
  EXPECT_TRUE(r.log.empty());
  const ModelParams fresh = [&] {
    ModelConfig m = tiny_model();
    m.class_names = d.class_names;
    return init_model(m, cfg.seed);
  }();
  ASSERT_EQ(r.model.params.size(), fresh.params.size());
  for (std::size_t i = 0; i < fresh.params.size(); ++i) {
    EXPECT_EQ(r.model.params.entries()[i].value.storage(),
              fresh.params.entries()[i].value.storage());
  }
}

TEST(Fit, ZeroLearningRateLeavesParametersUnchanged) {
  const Dataset d = synth_dataset(3, 2);
  TrainConfig cfg;
  cfg.epochs = 2;
  cfg.learning_rate = 0.0;
  ModelConfig m = tiny_model();
  m.class_names = d.class_names;
  const ModelParams initial = init_model(m, 5);
  const FitResult r = fit(d, cfg, initial);
  EXPECT_EQ(r.log.size(), 2u);
  for (std::size_t i = 0; i < initial.params.size(); ++i) {
    EXPECT_EQ(r.model.params.entries()[i].value.storage(),
              initial.params.entries()[i].value.storage());
  }
}

TEST(Fit, IntraLossDecreasesAndIsReproducible) {
  const Dataset d = synth_dataset(4, 3);
  TrainConfig cfg;
  cfg.epochs = 25;
  cfg.learning_rate = 3e-3;
  cfg.seed = 7;
  const FitResult a = fit(d, cfg, tiny_model());
  ASSERT_EQ(a.log.size(), 25u);
  EXPECT_LT(a.log.back().loss, a.log.front().loss);
  for (std::size_t i = 1; i < a.log.size(); ++i) {
    EXPECT_GE(a.log[i].wall_seconds, a.log[i - 1].wall_seconds);
  }
  const FitResult b = fit(d, cfg, tiny_model());
  for (std::size_t i = 0; i < a.log.size(); ++i) {
    EXPECT_EQ(a.log[i].loss, b.log[i].loss);
  }
}

TEST(Fit, CrossRegimeProducesEmbeddingModel) {
  const Dataset d = synth_dataset(2, 4);
  TrainConfig cfg;
  cfg.epochs = 2;
  cfg.regime = Regime::kCross;
  const FitResult r = fit(d, cfg, tiny_model());
  EXPECT_TRUE(r.model.config.class_names.empty());
  for (const auto& e : r.log) EXPECT_TRUE(std::isfinite(e.loss));
}

TEST(Fit, CheckpointWrittenForBestEpoch) {
  const Dataset d = synth_dataset(2, 6);
  TrainConfig cfg;
  cfg.epochs = 3;
  cfg.checkpoint_path =
      std::filesystem::temp_directory_path() / "handmotion_fit_test.hmm";
  const FitResult r = fit(d, cfg, tiny_model());
  const ModelParams loaded = load_model(cfg.checkpoint_path);
  for (std::size_t i = 0; i < loaded.params.size(); ++i) {
    EXPECT_EQ(loaded.params.entries()[i].value.storage(),
              rounded(r.best.params.entries()[i].value.storage()));
  }
  std::filesystem::remove(cfg.checkpoint_path);
}

TEST(Fit, MismatchedClassesRejected) {
  const Dataset d = synth_dataset(2, 8);
  ModelConfig m = tiny_model();
  m.class_names = {"x", "y"};
  TrainConfig cfg;
  cfg.epochs = 1;
  EXPECT_THROW(fit(d, cfg, init_model(m, 0)), UsageError);
}

}  // namespace
}  // namespace handmotion
