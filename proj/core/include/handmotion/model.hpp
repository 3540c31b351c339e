#ifndef HANDMOTION_MODEL_HPP_
#define HANDMOTION_MODEL_HPP_

#include <cstdint>
#include <filesystem>
#include <random>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "handmotion/features.hpp"
#include "handmotion/nn/checkpoint.hpp"
#include "handmotion/nn/graph.hpp"
#include "handmotion/skeleton.hpp"
#include "handmotion/summarize.hpp"
#include "handmotion/tcn.hpp"

namespace handmotion {

// Architecture plus the preprocessing the model was trained with.
struct ModelConfig {
  TcnConfig tcn;
  SummarizerConfig summarizer;
  // Classes of the linear head; empty for embedding-only (contrastive) models.
  std::vector<std::string> class_names;
  std::size_t frame_stride = 3;
  std::string joint_map = std::string(kSimplifiedFormat);

  void validate() const;
  std::size_t descriptor_dim() const { return tcn.channels; }
};

nn::ConfigBlock to_config_block(const ModelConfig& cfg);
ModelConfig model_config_from_block(const nn::ConfigBlock& block);

// Linear classifier g(z) = softmax(weight * z + bias).
struct LinearHead {
  Eigen::MatrixXd weight;  // [classes, dim]
  Eigen::VectorXd bias;    // [classes]
};

struct ModelParams {
  ModelConfig config;
  nn::ParamStore params;
};

namespace classifier_names {
inline const std::string kWeight = "cls.w";
inline const std::string kBias = "cls.b";
}  // namespace classifier_names

ModelParams init_model(const ModelConfig& cfg, std::uint64_t seed);
void save_model(const std::filesystem::path& path, const ModelParams& model);
ModelParams load_model(const std::filesystem::path& path);

// simplify -> frame skip (offset 0) -> pose features.
FeatureMatrix model_features(const MotionSequence& raw, const JointMap& map,
                             std::size_t frame_stride);

struct EncodedSequence {
  nn::Var frames;   // [T, channels]
  SummaryVars summary;
};

// Differentiable encoder over one feature sequence (T <= max_frames).
EncodedSequence encode_graph(nn::Graph& graph, const FeatureMatrix& features,
                             const ModelConfig& cfg,
                             std::mt19937_64* dropout_rng = nullptr);
// z [N, channels] -> logits [N, classes].
nn::Var classifier_graph(nn::Graph& graph, nn::Var z);

template <typename Scalar>
class InferenceModel {
 public:
  using Matrix = RowMatrix<Scalar>;
  using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

  explicit InferenceModel(const ModelParams& model);

  const ModelConfig& config() const { return cfg_; }
  const TcnEncoder<Scalar>& encoder() const { return encoder_; }
  const Summarizer<Scalar>& summarizer() const { return summarizer_; }
  bool has_classifier() const { return !cfg_.class_names.empty(); }

  Matrix frame_descriptors(const FeatureMatrix& features) const;
  // Summary of the trailing max_frames descriptors.
  Vector summary(const FeatureMatrix& features) const;
  Vector summary_of(const Matrix& descriptors) const;
  Vector last_descriptor(const FeatureMatrix& features) const;
  // Throws StateError without a classifier head.
  const LinearHead& linear_head() const;

 private:
  ModelConfig cfg_;
  TcnEncoder<Scalar> encoder_;
  Summarizer<Scalar> summarizer_;
  LinearHead head_;
};

extern template class InferenceModel<float>;
extern template class InferenceModel<double>;

}  // namespace handmotion

#endif  // HANDMOTION_MODEL_HPP_
