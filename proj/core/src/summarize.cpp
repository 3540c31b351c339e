#include "handmotion/summarize.hpp"

#include <cmath>

#include "handmotion/errors.hpp"

namespace handmotion {

void SummarizerConfig::validate() const {
  if (input_dim == 0 || reduced_dim == 0 || perceptron_size == 0 ||
      max_frames == 0) {
    throw UsageError("summarizer: all dimensions must be positive");
  }
  if (perceptron_size != max_frames) {
    throw UsageError("summarizer: perceptron_size (" +
                     std::to_string(perceptron_size) +
                     ") must equal max_frames (" + std::to_string(max_frames) +
                     ")");
  }
}

void init_summarizer_params(nn::ParamStore& params,
                            const SummarizerConfig& cfg, std::mt19937_64& rng) {
  cfg.validate();
  auto uniform = [&](nn::Shape shape, std::size_t fan_in) {
    const double bound = 1.0 / std::sqrt(static_cast<double>(fan_in));
    std::uniform_real_distribution<double> dist(-bound, bound);
    nn::Tensor t(std::move(shape));
    for (auto& v : t.values()) v = dist(rng);
    return t;
  };
  params.add(summarizer_names::kReduceWeight,
             uniform({cfg.input_dim, cfg.reduced_dim}, cfg.input_dim));
  params.add(summarizer_names::kReduceBias, nn::Tensor({cfg.reduced_dim}));
  const std::size_t fan_in = cfg.max_frames * cfg.reduced_dim;
  params.add(summarizer_names::kScoreWeight,
             uniform({fan_in, cfg.perceptron_size}, fan_in));
  params.add(summarizer_names::kScoreBias, nn::Tensor({cfg.perceptron_size}));
}

SummaryVars summarize_forward(nn::Graph& graph, nn::Var descriptors,
                              const SummarizerConfig& cfg) {
  const auto& dv = graph.value(descriptors);
  if (dv.rank() != 2 || dv.dim(1) != cfg.input_dim) {
    throw DimensionError("summarizer input: expected [T, " +
                         std::to_string(cfg.input_dim) + "], got " +
                         nn::shape_string(dv.shape()));
  }
  const std::size_t steps = dv.dim(0);
  if (steps == 0) throw DimensionError("summarizer input is empty");
  if (steps > cfg.max_frames) {
    throw OverLengthError("summarizer: " + std::to_string(steps) +
                          " frames exceed max_frames " +
                          std::to_string(cfg.max_frames));
  }
  using namespace summarizer_names;
  nn::Var reduced = graph.linear(descriptors, graph.param(kReduceWeight),
                                 graph.param(kReduceBias));
  nn::Var padded = graph.pad_front_rows(reduced, cfg.max_frames);
  nn::Var flat =
      graph.reshape(padded, {1, cfg.max_frames * cfg.reduced_dim});
  nn::Var scores = graph.sigmoid(
      graph.linear(flat, graph.param(kScoreWeight), graph.param(kScoreBias)));
  // Padded slots are dropped before normalization (weight 0).
  nn::Var weights =
      graph.l1_normalize_rows(graph.tail_columns(scores, steps));
  nn::Var summary = graph.matmul(weights, descriptors);
  return {weights, summary};
}

template <typename Scalar>
Summarizer<Scalar>::Summarizer(const nn::ParamStore& params,
                               SummarizerConfig cfg)
    : cfg_(cfg) {
  cfg_.validate();
  using namespace summarizer_names;
  const auto& rw = params.value(kReduceWeight);
  const auto& sw = params.value(kScoreWeight);
  if (rw.size() != cfg_.input_dim * cfg_.reduced_dim ||
      sw.size() != cfg_.max_frames * cfg_.reduced_dim * cfg_.perceptron_size) {
    throw DimensionError("summarizer parameters do not match config");
  }
  reduce_w_ = rw.matrix(cfg_.input_dim).template cast<Scalar>();
  reduce_b_ = params.value(kReduceBias).matrix(1).row(0).template cast<Scalar>();
  score_w_ = sw.matrix(cfg_.max_frames * cfg_.reduced_dim)
                 .template cast<Scalar>();
  score_b_ = params.value(kScoreBias).matrix(1).row(0).template cast<Scalar>();
}

template <typename Scalar>
SummaryResult<Scalar> Summarizer<Scalar>::summarize(
    const Matrix& descriptors) const {
  const auto steps = static_cast<std::size_t>(descriptors.rows());
  if (static_cast<std::size_t>(descriptors.cols()) != cfg_.input_dim) {
    throw DimensionError(
        shape_message("summarizer input width", cfg_.input_dim,
                      static_cast<std::size_t>(descriptors.cols())));
  }
  if (steps == 0) throw DimensionError("summarizer input is empty");
  if (steps > cfg_.max_frames) {
    throw OverLengthError("summarizer: " + std::to_string(steps) +
                          " frames exceed max_frames " +
                          std::to_string(cfg_.max_frames));
  }
  const auto pad = static_cast<Eigen::Index>(cfg_.max_frames - steps);
  const auto reduced_dim = static_cast<Eigen::Index>(cfg_.reduced_dim);
  Matrix reduced = descriptors * reduce_w_;
  reduced.rowwise() += reduce_b_;
  Eigen::Matrix<Scalar, 1, Eigen::Dynamic> flat =
      Eigen::Matrix<Scalar, 1, Eigen::Dynamic>::Zero(
          static_cast<Eigen::Index>(cfg_.max_frames) * reduced_dim);
  for (Eigen::Index t = 0; t < reduced.rows(); ++t) {
    flat.segment((pad + t) * reduced_dim, reduced_dim) = reduced.row(t);
  }
  Eigen::Matrix<Scalar, 1, Eigen::Dynamic> logits = flat * score_w_ + score_b_;

  SummaryResult<Scalar> out;
  out.weights.resize(static_cast<Eigen::Index>(steps));
  for (Eigen::Index t = 0; t < out.weights.size(); ++t) {
    const Scalar x = logits(pad + t);
    out.weights(t) = x >= Scalar(0) ? Scalar(1) / (Scalar(1) + std::exp(-x))
                                    : std::exp(x) / (Scalar(1) + std::exp(x));
  }
  out.weights /= out.weights.sum();
  out.summary = (out.weights.transpose() * descriptors).transpose();
  if (!out.summary.allFinite() || !out.weights.allFinite()) {
    throw NumericalError("summarizer produced non-finite output");
  }
  return out;
}

template class Summarizer<float>;
template class Summarizer<double>;

}  // namespace handmotion
