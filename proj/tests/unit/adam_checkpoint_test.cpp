#include <cmath>
#include <sstream>

#include <gtest/gtest.h>

#include "handmotion/errors.hpp"
#include "handmotion/model.hpp"
#include "handmotion/nn/adam.hpp"
#include "handmotion/nn/checkpoint.hpp"
#include "test_util.hpp"

namespace handmotion::nn {
namespace {

TEST(Adam, FirstStepMovesByLearningRate) {
  // With bias correction the first update is lr * g / (|g| + eps).
  ParamStore s;
  s.add("w", Tensor({3}, {1.0, 2.0, 3.0}));
  s.grad("w") = Tensor({3}, {0.5, -4.0, 0.0});
  Adam adam(AdamConfig{.lr = 0.1});
  adam.step(s);
  EXPECT_NEAR(s.value("w")[0], 1.0 - 0.1 * 0.5 / (0.5 + 1e-8), 1e-15);
  EXPECT_NEAR(s.value("w")[1], 2.0 + 0.1 * 4.0 / (4.0 + 1e-8), 1e-15);
  EXPECT_EQ(s.value("w")[2], 3.0);
  EXPECT_EQ(s.grad("w").storage(), (std::vector<double>{0, 0, 0}));
}

TEST(Adam, MatchesReferenceRecurrence) {
  ParamStore s;
  s.add("w", Tensor({1}, {0.0}));
  Adam adam;
  double w = 0.0, m = 0.0, v = 0.0;
  for (int t = 1; t <= 20; ++t) {
    const double g = std::sin(t) + 0.1 * t;
    s.grad("w")[0] = g;
    adam.step(s);
    m = 0.9 * m + 0.1 * g;
    v = 0.999 * v + 0.001 * g * g;
    const double mh = m / (1 - std::pow(0.9, t));
    const double vh = v / (1 - std::pow(0.999, t));
    w -= 1e-3 * mh / (std::sqrt(vh) + 1e-8);
    ASSERT_NEAR(s.value("w")[0], w, 1e-15);
  }
  EXPECT_EQ(adam.step_count(), 20u);
}

TEST(Adam, ZeroLearningRateLeavesParameters) {
  ParamStore s;
  s.add("w", Tensor({2}, {1.0, -1.0}));
  s.grad("w") = Tensor({2}, {3.0, 3.0});
  Adam adam(AdamConfig{.lr = 0.0});
  adam.step(s);
  EXPECT_EQ(s.value("w").storage(), (std::vector<double>{1.0, -1.0}));
}

TEST(Checkpoint, RoundTripIsBitExactAfterFloatRounding) {
  std::mt19937_64 rng(3);
  ParamStore s;
  s.add("a", handmotion::testing::random_tensor({2, 3, 4}, rng));
  s.add("b", handmotion::testing::random_tensor({5}, rng));
  std::stringstream buf;
  save_checkpoint(buf, {{"k", "v"}, {"empty", ""}}, s);
  const Checkpoint c = load_checkpoint(buf);
  ASSERT_NE(c.find("k"), nullptr);
  EXPECT_EQ(*c.find("k"), "v");
  EXPECT_EQ(*c.find("empty"), "");
  EXPECT_EQ(c.find("missing"), nullptr);
  ASSERT_EQ(c.params.size(), 2u);
  EXPECT_EQ(c.params.value("a").shape(), (Shape{2, 3, 4}));
  for (std::size_t i = 0; i < s.value("a").size(); ++i) {
    EXPECT_EQ(c.params.value("a")[i],
              static_cast<double>(static_cast<float>(s.value("a")[i])));
  }
  std::stringstream again;
  save_checkpoint(again, c.config, c.params);
  const Checkpoint d = load_checkpoint(again);
  EXPECT_EQ(d.params.value("b").storage(), c.params.value("b").storage());
}

TEST(Checkpoint, LayoutStartsWithMagicAndVersion) {
  ParamStore s;
  s.add("w", Tensor({1}, {1.0}));
  std::stringstream buf;
  save_checkpoint(buf, {}, s);
  const std::string bytes = buf.str();
  ASSERT_GE(bytes.size(), 8u);
  EXPECT_EQ(bytes.substr(0, 4), "HMDL");
  EXPECT_EQ(bytes[4], 1);
  EXPECT_EQ(bytes[5], 0);
  // magic, version, 0 config entries, 1 tensor, name "w", rank 1, dim 1,
  // one float.
  EXPECT_EQ(bytes.size(), 4u + 4 + 4 + 4 + 4 + 1 + 4 + 4 + 4);
}

TEST(Checkpoint, CorruptInputRejected) {
  std::istringstream bad_magic("XXXX");
  EXPECT_THROW(load_checkpoint(bad_magic), ParseError);
  ParamStore s;
  s.add("w", Tensor({4}, 1.0));
  std::stringstream buf;
  save_checkpoint(buf, {}, s);
  std::string bytes = buf.str();
  bytes.resize(bytes.size() - 3);
  std::istringstream truncated(bytes);
  EXPECT_THROW(load_checkpoint(truncated), ParseError);
}

}  // namespace
}  // namespace handmotion::nn

namespace handmotion {
namespace {

TEST(ModelFile, ConfigSurvivesRoundTrip) {
  ModelConfig cfg;
  cfg.tcn.channels = 16;
  cfg.tcn.dilations = {1, 3};
  cfg.summarizer.input_dim = 16;
  cfg.summarizer.reduced_dim = 4;
  cfg.class_names = {"pinch", "swipe-right"};
  cfg.frame_stride = 2;
  cfg.joint_map = "shrec22";
  const ModelParams m = init_model(cfg, 5);
  const auto path = std::filesystem::temp_directory_path() / "hm_model.hmdl";
  save_model(path, m);
  const ModelParams back = load_model(path);
  EXPECT_EQ(back.config.tcn.channels, 16u);
  EXPECT_EQ(back.config.tcn.dilations, (std::vector<std::size_t>{1, 3}));
  EXPECT_EQ(back.config.class_names, cfg.class_names);
  EXPECT_EQ(back.config.frame_stride, 2u);
  EXPECT_EQ(back.config.joint_map, "shrec22");
  EXPECT_EQ(back.params.size(), m.params.size());
  std::filesystem::remove(path);
}

TEST(ModelFile, InitIsDeterministicAndFanInBounded) {
  ModelConfig cfg;
  cfg.tcn.channels = 8;
  cfg.summarizer.input_dim = 8;
  const ModelParams a = init_model(cfg, 1);
  const ModelParams b = init_model(cfg, 1);
  for (std::size_t i = 0; i < a.params.size(); ++i) {
    const auto& e = a.params.entries()[i];
    EXPECT_EQ(e.value.storage(), b.params.entries()[i].value.storage());
    if (e.name.ends_with(".b")) {
      for (double v : e.value.values()) EXPECT_EQ(v, 0.0);
    }
  }
  // Conv weights [K, Cin, Cout]: fan-in K * Cin.
  const auto& w = a.params.value("tcn.block0.conv0.w");
  const double bound = 1.0 / std::sqrt(4.0 * 54.0);
  for (double v : w.values()) EXPECT_LE(std::abs(v), bound);
}

}  // namespace
}  // namespace handmotion
