#include <random>
#include <string>
#include <vector>

#include <benchmark/benchmark.h>

#include "handmotion/classify.hpp"
#include "handmotion/model.hpp"
#include "handmotion/synth.hpp"

namespace handmotion {
namespace {

ModelConfig default_config() {
  ModelConfig cfg;
  cfg.summarizer.input_dim = cfg.tcn.channels;
  return cfg;
}

const ModelParams& shared_params() {
  static const ModelParams params = init_model(default_config(), 1);
  return params;
}

FeatureMatrix sample_features(std::size_t frames) {
  GestureSpec spec;
  spec.family = GestureFamily::kCircleCw;
  spec.duration_min = spec.duration_max = frames * 3;
  return model_features(generate(spec, 1).front(), JointMap::identity(), 3);
}

ReferenceSet random_refs(std::size_t n, std::size_t dim) {
  std::mt19937_64 rng(7);
  std::normal_distribution<double> normal;
  std::vector<Eigen::VectorXd> d;
  std::vector<std::string> l;
  for (std::size_t i = 0; i < n; ++i) {
    Eigen::VectorXd v(static_cast<Eigen::Index>(dim));
    for (auto& x : v) x = normal(rng);
    d.push_back(v);
    l.push_back("c" + std::to_string(i % 14));
  }
  return ReferenceSet(d, l);
}

void BM_StreamStep(benchmark::State& state) {
  const InferenceModel<float> model(shared_params());
  const auto& encoder = model.encoder();
  const FeatureMatrix f = sample_features(32);
  std::vector<float> frame(static_cast<std::size_t>(f.cols()));
  std::vector<float> out(encoder.config().channels);
  auto stream = encoder.make_state();
  Eigen::Index t = 0;
  for (auto _ : state) {
    for (Eigen::Index c = 0; c < f.cols(); ++c) {
      frame[static_cast<std::size_t>(c)] = static_cast<float>(f(t, c));
    }
    encoder.stream_step(stream, frame, out);
    benchmark::DoNotOptimize(out.data());
    t = (t + 1) % f.rows();
  }
}
BENCHMARK(BM_StreamStep);

void BM_SummaryForward(benchmark::State& state) {
  const InferenceModel<float> model(shared_params());
  const FeatureMatrix f = sample_features(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) {
    auto z = model.summary(f);
    benchmark::DoNotOptimize(z.data());
  }
}
BENCHMARK(BM_SummaryForward)->Arg(16)->Arg(32);

void BM_Knn(benchmark::State& state) {
  const std::size_t dim = 256;
  const ReferenceSet refs =
      random_refs(static_cast<std::size_t>(state.range(0)), dim);
  const Eigen::VectorXd z = Eigen::VectorXd::Random(dim);
  for (auto _ : state) {
    auto p = knn_classify(z, refs, 5);
    benchmark::DoNotOptimize(p.p.data());
  }
}
BENCHMARK(BM_Knn)->Arg(1000)->Arg(8000);

void BM_StreamingClassifierPush(benchmark::State& state) {
  const InferenceModel<float> model(shared_params());
  const ReferenceSet refs = random_refs(8000, model.config().tcn.channels);
  GestureSpec spec;
  spec.family = GestureFamily::kPinch;
  spec.duration_min = spec.duration_max = 90;
  const MotionSequence seq = generate(spec, 1).front();
  StreamingClassifier classifier(model, refs, 5, JointMap::identity());
  std::size_t t = 0;
  for (auto _ : state) {
    auto step = classifier.push(seq.frames[t]);
    benchmark::DoNotOptimize(step.probabilities.p.data());
    if (++t == seq.frames.size()) {
      t = 0;
      classifier.reset();
    }
  }
}
BENCHMARK(BM_StreamingClassifierPush);

}  // namespace
}  // namespace handmotion

BENCHMARK_MAIN();
