#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <sstream>

#include "handmotion/classify.hpp"
#include "handmotion/errors.hpp"
#include "handmotion/synth.hpp"
#include "test_util.hpp"

namespace handmotion {
namespace {

Eigen::VectorXd random_vector(std::mt19937_64& rng, Eigen::Index dim) {
  std::normal_distribution<double> n(0.0, 1.0);
  Eigen::VectorXd v(dim);
  for (Eigen::Index i = 0; i < dim; ++i) v[i] = n(rng);
  return v;
}

ReferenceSet random_refs(std::mt19937_64& rng, std::size_t count,
                         Eigen::Index dim, std::size_t classes) {
  std::vector<Eigen::VectorXd> d;
  std::vector<std::string> l;
  for (std::size_t i = 0; i < count; ++i) {
    d.push_back(random_vector(rng, dim));
    l.push_back("c" + std::to_string(i % classes));
  }
  return ReferenceSet(d, l);
}

// Brute-force inverse-distance vote, sorted by (distance, index).
std::map<std::string, double> knn_oracle(const Eigen::VectorXd& z,
                                         const ReferenceSet& refs,
                                         std::size_t k) {
  std::vector<std::pair<double, std::size_t>> all;
  for (std::size_t i = 0; i < refs.size(); ++i) {
    const Eigen::VectorXd& r = refs.descriptor(i);
    double dot = 0.0, nz = 0.0, nr = 0.0;
    for (Eigen::Index j = 0; j < z.size(); ++j) {
      dot += z[j] * r[j];
      nz += z[j] * z[j];
      nr += r[j] * r[j];
    }
    all.emplace_back(1.0 - dot / std::sqrt(nz * nr), i);
  }
  std::sort(all.begin(), all.end());
  std::map<std::string, double> votes;
  double total = 0.0;
  for (std::size_t i = 0; i < k; ++i) {
    votes[refs.label(all[i].second)] += 1.0 / all[i].first;
    total += 1.0 / all[i].first;
  }
  for (auto& [label, v] : votes) v /= total;
  return votes;
}

TEST(ClassProbabilities, LookupAndArgmax) {
  ClassProbabilities p{{"a", "b", "c"}, Eigen::Vector3d(0.2, 0.4, 0.4)};
  EXPECT_EQ(p.argmax(), 1u);
  EXPECT_EQ(p.top_label(), "b");
  EXPECT_DOUBLE_EQ(p.of("c"), 0.4);
  EXPECT_DOUBLE_EQ(p.of("z"), 0.0);
}

TEST(LinearClassify, SoftmaxOfAffineMap) {
  LinearHead head;
  head.weight = Eigen::MatrixXd{{1.0, 0.0}, {0.0, 1.0}, {1.0, 1.0}};
  head.bias = Eigen::Vector3d(0.0, 0.5, -1.0);
  const Eigen::Vector2d z(1.0, 2.0);
  const auto p = linear_classify(z, head, {"x", "y", "z"});
  const double e0 = std::exp(1.0), e1 = std::exp(2.5), e2 = std::exp(2.0);
  const double s = e0 + e1 + e2;
  EXPECT_NEAR(p.p[0], e0 / s, 1e-15);
  EXPECT_NEAR(p.p[1], e1 / s, 1e-15);
  EXPECT_NEAR(p.p[2], e2 / s, 1e-15);
  EXPECT_EQ(p.top_label(), "y");
  EXPECT_THROW(linear_classify(Eigen::Vector3d::Ones(), head, {"x", "y", "z"}),
               DimensionError);
}

TEST(ReferenceSet, Validation) {
  EXPECT_THROW(ReferenceSet({}, {}), DatasetError);
  EXPECT_THROW(ReferenceSet({Eigen::Vector2d::Zero()}, {"a"}), DatasetError);
  EXPECT_THROW(ReferenceSet({Eigen::Vector2d(NAN, 1.0)}, {"a"}),
               DatasetError);
  EXPECT_THROW(
      ReferenceSet({Eigen::Vector2d::Ones(), Eigen::Vector3d::Ones()},
                   {"a", "b"}),
      DatasetError);
  EXPECT_THROW(ReferenceSet({Eigen::Vector2d::Ones()}, {"a", "b"}),
               DimensionError);
  const ReferenceSet refs({Eigen::Vector2d(3, 4), Eigen::Vector2d(1, 0)},
                          {"b", "a"});
  EXPECT_EQ(refs.class_names(), (std::vector<std::string>{"a", "b"}));
  EXPECT_NEAR(refs.unit_rows().row(0).norm(), 1.0, 1e-15);
}

TEST(KnnClassify, MatchesBruteForceOracle) {
  std::mt19937_64 rng(1);
  const ReferenceSet refs = random_refs(rng, 60, 8, 4);
  for (int q = 0; q < 20; ++q) {
    const Eigen::VectorXd z = random_vector(rng, 8);
    for (std::size_t k : {1, 3, 5, 11, 60}) {
      const auto got = knn_classify(z, refs, k);
      const auto want = knn_oracle(z, refs, k);
      EXPECT_NEAR(got.p.sum(), 1.0, 1e-12);
      for (std::size_t c = 0; c < got.labels.size(); ++c) {
        const auto it = want.find(got.labels[c]);
        const double expect = it == want.end() ? 0.0 : it->second;
        EXPECT_NEAR(got.p[static_cast<Eigen::Index>(c)], expect, 1e-12);
      }
    }
  }
}

TEST(KnnClassify, ExactMatchTakesAllWeight) {
  const ReferenceSet refs(
      {Eigen::Vector2d(1, 0), Eigen::Vector2d(0, 1), Eigen::Vector2d(1, 1)},
      {"a", "b", "c"});
  const auto p = knn_classify(Eigen::Vector2d(2, 0), refs, 3);
  EXPECT_DOUBLE_EQ(p.of("a"), 1.0);
  EXPECT_DOUBLE_EQ(p.of("b"), 0.0);
}

TEST(KnnClassify, ExactMatchesWithDifferentLabelsSplit) {
  const ReferenceSet refs(
      {Eigen::Vector2d(1, 0), Eigen::Vector2d(3, 0), Eigen::Vector2d(0, 1)},
      {"a", "b", "c"});
  const auto p = knn_classify(Eigen::Vector2d(1, 0), refs, 1);
  EXPECT_DOUBLE_EQ(p.of("a"), 0.5);
  EXPECT_DOUBLE_EQ(p.of("b"), 0.5);
  EXPECT_DOUBLE_EQ(p.of("c"), 0.0);
  EXPECT_EQ(p.top_label(), "a");
}

TEST(KnnClassify, EquidistantTieBrokenByIndex) {
  const ReferenceSet refs({Eigen::Vector2d(1, 1), Eigen::Vector2d(1, -1)},
                          {"b", "a"});
  const auto p = knn_classify(Eigen::Vector2d(1, 0), refs, 1);
  EXPECT_EQ(p.top_label(), "b");
  EXPECT_DOUBLE_EQ(p.of("b"), 1.0);
}

TEST(KnnClassify, InvariantToDescriptorScale) {
  std::mt19937_64 rng(2);
  const ReferenceSet refs = random_refs(rng, 30, 6, 3);
  const Eigen::VectorXd z = random_vector(rng, 6);
  for (std::size_t k : {1, 5}) {
    const auto a = knn_classify(z, refs, k);
    const auto b = knn_classify(z * 37.5, refs, k);
    EXPECT_LT((a.p - b.p).cwiseAbs().maxCoeff(), 1e-12);
  }
}

TEST(KnnClassify, DuplicatingReferencesKeepsDecision) {
  // Holds when k selects either a single neighbour or every reference.
  std::mt19937_64 rng(3);
  const ReferenceSet refs = random_refs(rng, 20, 5, 3);
  std::vector<Eigen::VectorXd> d;
  std::vector<std::string> l;
  for (int rep = 0; rep < 2; ++rep) {
    for (std::size_t i = 0; i < refs.size(); ++i) {
      d.push_back(refs.descriptor(i));
      l.push_back(refs.label(i));
    }
  }
  const ReferenceSet doubled(d, l);
  for (int q = 0; q < 10; ++q) {
    const Eigen::VectorXd z = random_vector(rng, 5);
    EXPECT_EQ(knn_classify(z, refs, 1).top_label(),
              knn_classify(z, doubled, 1).top_label());
    const auto all = knn_classify(z, refs, refs.size());
    const auto all2 = knn_classify(z, doubled, doubled.size());
    EXPECT_LT((all.p - all2.p).cwiseAbs().maxCoeff(), 1e-12);
  }
}

TEST(KnnClassify, Errors) {
  const ReferenceSet refs({Eigen::Vector2d(1, 0)}, {"a"});
  EXPECT_THROW(knn_classify(Eigen::Vector2d(1, 0), refs, 0), UsageError);
  EXPECT_THROW(knn_classify(Eigen::Vector2d(1, 0), refs, 2), UsageError);
  EXPECT_THROW(knn_classify(Eigen::Vector3d(1, 0, 0), refs, 1),
               DimensionError);
  EXPECT_THROW(knn_classify(Eigen::Vector2d(0, 0), refs, 1), NumericalError);
}

TEST(SweepK, PicksBestAndSkipsOversizedK) {
  const ReferenceSet refs(
      {Eigen::Vector2d(1, 0.1), Eigen::Vector2d(1, -0.1),
       Eigen::Vector2d(-1, 0.1), Eigen::Vector2d(0.2, 1)},
      {"a", "a", "b", "b"});
  const std::vector<LabeledDescriptor> targets = {
      {Eigen::Vector2d(1, 0), "a"}, {Eigen::Vector2d(0.1, 1), "b"}};
  const auto r = sweep_k(targets, refs);
  ASSERT_EQ(r.table.size(), 2u);  // k = 1, 3
  EXPECT_EQ(r.table[0].k, 1u);
  EXPECT_DOUBLE_EQ(r.table[0].accuracy, 1.0);
  EXPECT_EQ(r.best_k, 1u);
  EXPECT_DOUBLE_EQ(r.best_accuracy, 1.0);
  EXPECT_DOUBLE_EQ(knn_accuracy(targets, refs, 1), 1.0);
}

TEST(AverageProbabilities, MeanOfFrames) {
  ClassProbabilities a{{"x", "y"}, Eigen::Vector2d(1.0, 0.0)};
  ClassProbabilities b{{"x", "y"}, Eigen::Vector2d(0.5, 0.5)};
  const auto m = average_probabilities({a, b});
  EXPECT_DOUBLE_EQ(m.of("x"), 0.75);
  EXPECT_DOUBLE_EQ(m.of("y"), 0.25);
  ClassProbabilities c{{"x", "z"}, Eigen::Vector2d(1.0, 0.0)};
  EXPECT_THROW(average_probabilities({a, c}), DimensionError);
  EXPECT_THROW(average_probabilities({}), UsageError);
}

TEST(ReferenceSet, SubsampleIsReproducible) {
  std::mt19937_64 rng(4);
  const ReferenceSet refs = random_refs(rng, 50, 3, 5);
  const auto a = refs.subsample(20, 9);
  const auto b = refs.subsample(20, 9);
  ASSERT_EQ(a.size(), 20u);
  for (std::size_t i = 0; i < a.size(); ++i) {
    EXPECT_EQ(a.descriptor(i), b.descriptor(i));
    EXPECT_EQ(a.label(i), b.label(i));
  }
  EXPECT_EQ(refs.subsample(100, 9).size(), 50u);
}

TEST(Dsc, RoundTripIsExact) {
  std::mt19937_64 rng(5);
  std::vector<LabeledDescriptor> rows;
  for (int i = 0; i < 5; ++i) {
    rows.push_back({random_vector(rng, 7), "label " + std::to_string(i)});
  }
  std::stringstream buf;
  write_dsc(buf, rows);
  const auto back = read_dsc(buf);
  ASSERT_EQ(back.size(), rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    EXPECT_EQ(back[i].label, rows[i].label);
    EXPECT_EQ(back[i].descriptor, rows[i].descriptor);
  }
  const ReferenceSet refs = to_reference_set(back);
  EXPECT_EQ(refs.size(), 5u);
}

TEST(Dsc, MalformedInput) {
  std::stringstream bad_header("dsc v2 dim=3\n");
  EXPECT_THROW(read_dsc(bad_header), ParseError);
  std::stringstream short_row("dsc v1 dim=3\na\t1 2\n");
  EXPECT_THROW(read_dsc(short_row), ParseError);
  std::stringstream empty("");
  EXPECT_THROW(read_dsc(empty), ParseError);
}

class StreamingTest : public ::testing::Test {
 protected:
  void SetUp() override {
    ModelConfig cfg;
    cfg.tcn.channels = 16;
    cfg.summarizer.input_dim = 16;
    cfg.summarizer.reduced_dim = 4;
    model_ = init_model(cfg, 11);
    inference_ = std::make_unique<InferenceModel<float>>(model_);
    std::vector<Eigen::VectorXd> d;
    std::vector<std::string> l;
    for (auto family : {GestureFamily::kSwipeLeft, GestureFamily::kPinch}) {
      GestureSpec spec;
      spec.family = family;
      for (const auto& s : generate(spec, 4)) {
        const auto f =
            model_features(s, JointMap::identity(), cfg.frame_stride);
        d.push_back(inference_->summary(f).cast<double>());
        l.push_back(*s.label);
      }
    }
    refs_ = ReferenceSet(d, l);
  }

  ModelParams model_;
  std::unique_ptr<InferenceModel<float>> inference_;
  ReferenceSet refs_;
};

TEST_F(StreamingTest, MatchesOfflinePerFrameKnn) {
  GestureSpec spec;
  spec.family = GestureFamily::kSwipeLeft;
  spec.seed = 99;
  const MotionSequence seq = generate(spec, 1).front();
  const auto result =
      classify_stream(seq, *inference_, refs_, 3, JointMap::identity());
  const auto features =
      model_features(seq, JointMap::identity(), model_.config.frame_stride);
  const auto desc = inference_->frame_descriptors(features);
  ASSERT_EQ(result.frames.size(), static_cast<std::size_t>(desc.rows()));
  for (Eigen::Index t = 0; t < desc.rows(); ++t) {
    const Eigen::VectorXd z = desc.row(t).transpose().cast<double>();
    const auto offline = knn_classify(z, refs_, 3);
    EXPECT_EQ(result.frames[static_cast<std::size_t>(t)].p, offline.p);
  }
  const auto avg = average_probabilities(result.frames);
  EXPECT_EQ(result.video.p, avg.p);
}

TEST_F(StreamingTest, ThinnedFramesRepeatLatestPrediction) {
  GestureSpec spec;
  spec.seed = 5;
  const MotionSequence seq = generate(spec, 1).front();
  StreamingClassifier sc(*inference_, refs_, 1, JointMap::identity());
  std::size_t fresh = 0;
  ClassProbabilities last;
  for (std::size_t t = 0; t < seq.frames.size(); ++t) {
    const auto step = sc.push(seq.frames[t]);
    EXPECT_EQ(step.t, t);
    EXPECT_EQ(step.fresh, t % 3 == 0);
    if (step.fresh) {
      ++fresh;
      last = step.probabilities;
    } else {
      EXPECT_EQ(step.probabilities.p, last.p);
    }
  }
  EXPECT_EQ(sc.frame_probabilities().size(), fresh);
  const auto first = sc.frame_probabilities().front();
  sc.reset();
  EXPECT_TRUE(sc.frame_probabilities().empty());
  EXPECT_EQ(sc.push(seq.frames[0]).probabilities.p, first.p);
}

TEST_F(StreamingTest, ShortSequenceUsesEveryFrame) {
  GestureSpec spec;
  const MotionSequence full = generate(spec, 1).front();
  MotionSequence seq = full;
  seq.frames.resize(3);
  const auto r = classify_stream(seq, *inference_, refs_, 1,
                                 JointMap::identity());
  EXPECT_EQ(r.frames.size(), 3u);
}

}  // namespace
}  // namespace handmotion
