#ifndef HANDMOTION_TCN_HPP_
#define HANDMOTION_TCN_HPP_

#include <cstddef>
#include <random>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "handmotion/nn/graph.hpp"
#include "handmotion/nn/tensor.hpp"

namespace handmotion {

template <typename Scalar>
using AlignedVector = std::vector<Scalar, Eigen::aligned_allocator<Scalar>>;

template <typename Scalar>
using RowMatrix =
    Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

// Residual stacks of causal dilated convolutions. Each residual block holds
// `convs_per_block` convolutions (each followed by ReLU) at the block's
// dilation, plus an identity skip (or a 1x1 projection when the channel
// count changes); the block output is ReLU(conv path + skip).
struct TcnConfig {
  std::size_t input_dim = 54;
  std::size_t channels = 256;
  std::size_t kernel_size = 4;
  std::vector<std::size_t> dilations = {1, 2, 4};
  std::size_t num_stacks = 2;
  std::size_t convs_per_block = 2;
  std::string activation = "relu";
  double dropout = 0.0;

  void validate() const;
  std::size_t block_count() const { return num_stacks * dilations.size(); }
  std::size_t block_dilation(std::size_t block) const {
    return dilations[block % dilations.size()];
  }
  std::size_t block_input_dim(std::size_t block) const {
    return block == 0 ? input_dim : channels;
  }
  // Frames that can influence one output:
  //   1 + convs_per_block * (kernel_size - 1) * num_stacks * sum(dilations)
  std::size_t receptive_field() const;
};

namespace tcn_names {
std::string conv_weight(std::size_t block, std::size_t conv);
std::string conv_bias(std::size_t block, std::size_t conv);
std::string skip_weight(std::size_t block);
std::string skip_bias(std::size_t block);
}  // namespace tcn_names

// Adds the TCN parameters (fan-in uniform weights, zero biases).
void init_tcn_params(nn::ParamStore& params, const TcnConfig& cfg,
                     std::mt19937_64& rng);

// Differentiable forward over features [T, input_dim] -> [T, channels].
// `dropout_rng` is only used when cfg.dropout > 0.
nn::Var tcn_forward(nn::Graph& graph, nn::Var features, const TcnConfig& cfg,
                    std::mt19937_64* dropout_rng = nullptr);

// Frozen, non-differentiable encoder for inference. Batch and streaming
// evaluation share one per-frame kernel, so both produce the same values.
template <typename Scalar>
class TcnEncoder {
 public:
  using Matrix = RowMatrix<Scalar>;

  class StreamState {
   public:
    std::size_t frames_seen() const { return frames_; }
    // Back to the zero-history state.
    void reset();
    // Capacity of each convolution's history buffer, (K - 1) * dilation.
    std::vector<std::size_t> buffer_capacities() const;

   private:
    friend class TcnEncoder;
    struct ConvBuffer {
      std::size_t capacity = 0;
      std::size_t width = 0;
      AlignedVector<Scalar> rows;  // capacity x width ring
    };
    std::vector<ConvBuffer> buffers_;
    AlignedVector<Scalar> scratch_a_, scratch_b_, scratch_c_;
    std::size_t frames_ = 0;
  };

  TcnEncoder(const nn::ParamStore& params, TcnConfig cfg);

  const TcnConfig& config() const { return cfg_; }
  std::size_t output_dim() const { return cfg_.channels; }

  // features [T, input_dim] -> descriptors [T, channels].
  Matrix forward(const Matrix& features) const;

  StreamState make_state() const;
  // Feeds one frame and writes the descriptor for it.
  void stream_step(StreamState& state, std::span<const Scalar> frame,
                   std::span<Scalar> out) const;

 private:
  struct Conv {
    std::size_t kernel = 1;
    std::size_t dilation = 1;
    std::size_t in_dim = 0;
    std::size_t out_dim = 0;
    Matrix weight;  // [kernel * in_dim, out_dim]
    Eigen::Matrix<Scalar, 1, Eigen::Dynamic> bias;
  };
  struct Block {
    std::vector<Conv> convs;
    bool has_projection = false;
    Conv projection;
  };

  // out = bias + sum over taps k of taps[k] * weight rows [k*in, (k+1)*in);
  // null taps are skipped (zero history).
  static void conv_kernel(const Conv& conv, const Scalar* const* taps,
                          Scalar* out);

  TcnConfig cfg_;
  std::vector<Block> blocks_;
};

extern template class TcnEncoder<float>;
extern template class TcnEncoder<double>;

}  // namespace handmotion

#endif  // HANDMOTION_TCN_HPP_
