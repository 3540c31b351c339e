#ifndef HANDMOTION_SUMMARIZE_HPP_
#define HANDMOTION_SUMMARIZE_HPP_

#include <cstddef>
#include <random>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "handmotion/nn/graph.hpp"
#include "handmotion/nn/tensor.hpp"
#include "handmotion/tcn.hpp"

namespace handmotion {

// Relevance-weighted averaging of per-frame descriptors. A kernel-1
// convolution reduces each descriptor to `reduced_dim`; one fully connected
// layer over the time-ordered concatenation (front-padded with zeros up to
// max_frames) emits one sigmoid score per frame slot; the scores of real
// frames are L1-normalized into weights.
struct SummarizerConfig {
  std::size_t input_dim = 256;
  std::size_t reduced_dim = 64;
  // Width of the weight-emitting perceptron; one output per frame slot, so
  // it must equal max_frames.
  std::size_t perceptron_size = 32;
  std::size_t max_frames = 32;

  void validate() const;
};

namespace summarizer_names {
inline const std::string kReduceWeight = "summ.reduce.w";
inline const std::string kReduceBias = "summ.reduce.b";
inline const std::string kScoreWeight = "summ.score.w";
inline const std::string kScoreBias = "summ.score.b";
}  // namespace summarizer_names

void init_summarizer_params(nn::ParamStore& params,
                            const SummarizerConfig& cfg, std::mt19937_64& rng);

struct SummaryVars {
  nn::Var weights;  // [1, T]
  nn::Var summary;  // [1, input_dim]
};

// descriptors [T, input_dim] with 1 <= T <= max_frames.
SummaryVars summarize_forward(nn::Graph& graph, nn::Var descriptors,
                              const SummarizerConfig& cfg);

template <typename Scalar>
struct SummaryResult {
  Eigen::Matrix<Scalar, Eigen::Dynamic, 1> weights;
  Eigen::Matrix<Scalar, Eigen::Dynamic, 1> summary;
};

template <typename Scalar>
class Summarizer {
 public:
  using Matrix = RowMatrix<Scalar>;

  Summarizer(const nn::ParamStore& params, SummarizerConfig cfg);
  const SummarizerConfig& config() const { return cfg_; }

  // Throws OverLengthError when T > max_frames.
  SummaryResult<Scalar> summarize(const Matrix& descriptors) const;

 private:
  SummarizerConfig cfg_;
  Matrix reduce_w_;
  Eigen::Matrix<Scalar, 1, Eigen::Dynamic> reduce_b_;
  Matrix score_w_;
  Eigen::Matrix<Scalar, 1, Eigen::Dynamic> score_b_;
};

extern template class Summarizer<float>;
extern template class Summarizer<double>;

}  // namespace handmotion

#endif  // HANDMOTION_SUMMARIZE_HPP_
