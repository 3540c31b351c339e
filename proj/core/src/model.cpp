#include "handmotion/model.hpp"

#include <cmath>
#include <sstream>

#include "handmotion/augment.hpp"
#include "handmotion/errors.hpp"

namespace handmotion {

namespace {

std::string join_sizes(const std::vector<std::size_t>& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) s += ',';
    s += std::to_string(v[i]);
  }
  return s;
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  if (s.empty()) return out;
  std::string cur;
  std::istringstream in(s);
  while (std::getline(in, cur, sep)) out.push_back(cur);
  return out;
}

std::size_t to_size(const std::string& key, const std::string& v) {
  try {
    std::size_t used = 0;
    const auto n = std::stoull(v, &used);
    if (used != v.size()) throw std::invalid_argument(v);
    return static_cast<std::size_t>(n);
  } catch (const std::exception&) {
    throw ParseError("checkpoint config " + key + ": bad integer '" + v + "'");
  }
}

}  // namespace

void ModelConfig::validate() const {
  tcn.validate();
  summarizer.validate();
  if (summarizer.input_dim != tcn.channels) {
    throw UsageError("summarizer input_dim must equal tcn channels");
  }
  if (frame_stride == 0) throw UsageError("frame_stride must be >= 1");
  for (const auto& c : class_names) {
    if (c.empty() || c.find_first_of(", \t\n") != std::string::npos) {
      throw UsageError("class name '" + c + "' is empty or has separators");
    }
  }
}

nn::ConfigBlock to_config_block(const ModelConfig& cfg) {
  std::string classes;
  for (std::size_t i = 0; i < cfg.class_names.size(); ++i) {
    if (i) classes += ',';
    classes += cfg.class_names[i];
  }
  std::ostringstream dropout;
  dropout.precision(17);
  dropout << cfg.tcn.dropout;
  return {
      {"tcn.input_dim", std::to_string(cfg.tcn.input_dim)},
      {"tcn.channels", std::to_string(cfg.tcn.channels)},
      {"tcn.kernel_size", std::to_string(cfg.tcn.kernel_size)},
      {"tcn.dilations", join_sizes(cfg.tcn.dilations)},
      {"tcn.num_stacks", std::to_string(cfg.tcn.num_stacks)},
      {"tcn.convs_per_block", std::to_string(cfg.tcn.convs_per_block)},
      {"tcn.activation", cfg.tcn.activation},
      {"tcn.dropout", dropout.str()},
      {"tcn.receptive_field", std::to_string(cfg.tcn.receptive_field())},
      {"summarizer.reduced_dim", std::to_string(cfg.summarizer.reduced_dim)},
      {"summarizer.perceptron_size",
       std::to_string(cfg.summarizer.perceptron_size)},
      {"summarizer.max_frames", std::to_string(cfg.summarizer.max_frames)},
      {"model.classes", classes},
      {"model.frame_stride", std::to_string(cfg.frame_stride)},
      {"model.joint_map", cfg.joint_map},
  };
}

ModelConfig model_config_from_block(const nn::ConfigBlock& block) {
  ModelConfig cfg;
  for (const auto& [key, value] : block) {
    if (key == "tcn.input_dim") {
      cfg.tcn.input_dim = to_size(key, value);
    } else if (key == "tcn.channels") {
      cfg.tcn.channels = to_size(key, value);
    } else if (key == "tcn.kernel_size") {
      cfg.tcn.kernel_size = to_size(key, value);
    } else if (key == "tcn.dilations") {
      cfg.tcn.dilations.clear();
      for (const auto& d : split(value, ',')) {
        cfg.tcn.dilations.push_back(to_size(key, d));
      }
    } else if (key == "tcn.num_stacks") {
      cfg.tcn.num_stacks = to_size(key, value);
    } else if (key == "tcn.convs_per_block") {
      cfg.tcn.convs_per_block = to_size(key, value);
    } else if (key == "tcn.activation") {
      cfg.tcn.activation = value;
    } else if (key == "tcn.dropout") {
      cfg.tcn.dropout = std::stod(value);
    } else if (key == "summarizer.reduced_dim") {
      cfg.summarizer.reduced_dim = to_size(key, value);
    } else if (key == "summarizer.perceptron_size") {
      cfg.summarizer.perceptron_size = to_size(key, value);
    } else if (key == "summarizer.max_frames") {
      cfg.summarizer.max_frames = to_size(key, value);
    } else if (key == "model.classes") {
      cfg.class_names = split(value, ',');
    } else if (key == "model.frame_stride") {
      cfg.frame_stride = to_size(key, value);
    } else if (key == "model.joint_map") {
      cfg.joint_map = value;
    }
    // Unknown keys (e.g. derived values) are informational.
  }
  cfg.summarizer.input_dim = cfg.tcn.channels;
  cfg.validate();
  return cfg;
}

ModelParams init_model(const ModelConfig& cfg, std::uint64_t seed) {
  cfg.validate();
  ModelParams model;
  model.config = cfg;
  std::mt19937_64 rng(seed);
  init_tcn_params(model.params, cfg.tcn, rng);
  init_summarizer_params(model.params, cfg.summarizer, rng);
  if (!cfg.class_names.empty()) {
    const std::size_t dim = cfg.descriptor_dim();
    const double bound = 1.0 / std::sqrt(static_cast<double>(dim));
    std::uniform_real_distribution<double> dist(-bound, bound);
    nn::Tensor w({dim, cfg.class_names.size()});
    for (auto& v : w.values()) v = dist(rng);
    model.params.add(classifier_names::kWeight, std::move(w));
    model.params.add(classifier_names::kBias,
                     nn::Tensor({cfg.class_names.size()}));
  }
  return model;
}

void save_model(const std::filesystem::path& path, const ModelParams& model) {
  nn::save_checkpoint(path, to_config_block(model.config), model.params);
}

ModelParams load_model(const std::filesystem::path& path) {
  auto ckpt = nn::load_checkpoint(path);
  ModelParams model;
  model.config = model_config_from_block(ckpt.config);
  model.params = std::move(ckpt.params);
  return model;
}

FeatureMatrix model_features(const MotionSequence& raw, const JointMap& map,
                             std::size_t frame_stride) {
  MotionSequence simplified =
      (!raw.frames.empty() && raw.frames.front().is_simplified() &&
       map.format_id() == kSimplifiedFormat)
          ? raw
          : simplify(raw, map);
  return to_matrix(
      extract_features(prepare_for_model(simplified, frame_stride)));
}

EncodedSequence encode_graph(nn::Graph& graph, const FeatureMatrix& features,
                             const ModelConfig& cfg,
                             std::mt19937_64* dropout_rng) {
  nn::Tensor input({static_cast<std::size_t>(features.rows()),
                    static_cast<std::size_t>(features.cols())},
                   std::vector<double>(features.data(),
                                       features.data() + features.size()));
  EncodedSequence out;
  out.frames = tcn_forward(graph, graph.input(std::move(input)), cfg.tcn,
                           dropout_rng);
  out.summary = summarize_forward(graph, out.frames, cfg.summarizer);
  return out;
}

nn::Var classifier_graph(nn::Graph& graph, nn::Var z) {
  return graph.linear(z, graph.param(classifier_names::kWeight),
                      graph.param(classifier_names::kBias));
}

template <typename Scalar>
InferenceModel<Scalar>::InferenceModel(const ModelParams& model)
    : cfg_(model.config),
      encoder_(model.params, model.config.tcn),
      summarizer_(model.params, model.config.summarizer) {
  if (has_classifier()) {
    const auto& w = model.params.value(classifier_names::kWeight);
    const auto& b = model.params.value(classifier_names::kBias);
    if (w.rank() != 2 || w.dim(0) != cfg_.descriptor_dim() ||
        w.dim(1) != cfg_.class_names.size() ||
        b.size() != cfg_.class_names.size()) {
      throw DimensionError("classifier parameters do not match config");
    }
    head_.weight = w.matrix().transpose();
    head_.bias = b.matrix(1).row(0).transpose();
  }
}

template <typename Scalar>
typename InferenceModel<Scalar>::Matrix
InferenceModel<Scalar>::frame_descriptors(const FeatureMatrix& features) const {
  return encoder_.forward(features.template cast<Scalar>());
}

template <typename Scalar>
typename InferenceModel<Scalar>::Vector InferenceModel<Scalar>::summary_of(
    const Matrix& descriptors) const {
  const auto max_frames =
      static_cast<Eigen::Index>(cfg_.summarizer.max_frames);
  if (descriptors.rows() <= max_frames) {
    return summarizer_.summarize(descriptors).summary;
  }
  const Matrix tail = descriptors.bottomRows(max_frames);
  return summarizer_.summarize(tail).summary;
}

template <typename Scalar>
typename InferenceModel<Scalar>::Vector InferenceModel<Scalar>::summary(
    const FeatureMatrix& features) const {
  return summary_of(frame_descriptors(features));
}

template <typename Scalar>
typename InferenceModel<Scalar>::Vector
InferenceModel<Scalar>::last_descriptor(const FeatureMatrix& features) const {
  const Matrix d = frame_descriptors(features);
  return d.row(d.rows() - 1).transpose();
}

template <typename Scalar>
const LinearHead& InferenceModel<Scalar>::linear_head() const {
  if (!has_classifier()) {
    throw StateError("model has no linear classifier head");
  }
  return head_;
}

template class InferenceModel<float>;
template class InferenceModel<double>;

}  // namespace handmotion
