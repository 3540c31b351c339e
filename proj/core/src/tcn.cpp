#include "handmotion/tcn.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "handmotion/errors.hpp"

namespace handmotion {

void TcnConfig::validate() const {
  if (input_dim == 0 || channels == 0 || kernel_size == 0 ||
      num_stacks == 0 || convs_per_block == 0 || dilations.empty()) {
    throw UsageError("tcn: all dimensions must be positive");
  }
  for (auto d : dilations) {
    if (d == 0) throw UsageError("tcn: dilations must be positive");
  }
  if (activation != "relu") {
    throw UsageError("tcn: unsupported activation '" + activation + "'");
  }
  if (dropout < 0.0 || dropout >= 1.0) {
    throw UsageError("tcn: dropout must lie in [0, 1)");
  }
}

std::size_t TcnConfig::receptive_field() const {
  const std::size_t dil_sum =
      std::accumulate(dilations.begin(), dilations.end(), std::size_t{0});
  return 1 + convs_per_block * (kernel_size - 1) * num_stacks * dil_sum;
}

namespace tcn_names {
std::string conv_weight(std::size_t block, std::size_t conv) {
  return "tcn.block" + std::to_string(block) + ".conv" + std::to_string(conv) +
         ".w";
}
std::string conv_bias(std::size_t block, std::size_t conv) {
  return "tcn.block" + std::to_string(block) + ".conv" + std::to_string(conv) +
         ".b";
}
std::string skip_weight(std::size_t block) {
  return "tcn.block" + std::to_string(block) + ".skip.w";
}
std::string skip_bias(std::size_t block) {
  return "tcn.block" + std::to_string(block) + ".skip.b";
}
}  // namespace tcn_names

namespace {

nn::Tensor fan_in_uniform(nn::Shape shape, std::size_t fan_in,
                          std::mt19937_64& rng) {
  const double bound = 1.0 / std::sqrt(static_cast<double>(fan_in));
  std::uniform_real_distribution<double> dist(-bound, bound);
  nn::Tensor t(std::move(shape));
  for (auto& v : t.values()) v = dist(rng);
  return t;
}

}  // namespace

void init_tcn_params(nn::ParamStore& params, const TcnConfig& cfg,
                     std::mt19937_64& rng) {
  cfg.validate();
  const std::size_t k = cfg.kernel_size;
  for (std::size_t b = 0; b < cfg.block_count(); ++b) {
    std::size_t in = cfg.block_input_dim(b);
    for (std::size_t c = 0; c < cfg.convs_per_block; ++c) {
      params.add(tcn_names::conv_weight(b, c),
                 fan_in_uniform({k, in, cfg.channels}, k * in, rng));
      params.add(tcn_names::conv_bias(b, c), nn::Tensor({cfg.channels}));
      in = cfg.channels;
    }
    if (cfg.block_input_dim(b) != cfg.channels) {
      params.add(tcn_names::skip_weight(b),
                 fan_in_uniform({cfg.block_input_dim(b), cfg.channels},
                                cfg.block_input_dim(b), rng));
      params.add(tcn_names::skip_bias(b), nn::Tensor({cfg.channels}));
    }
  }
}

nn::Var tcn_forward(nn::Graph& graph, nn::Var features, const TcnConfig& cfg,
                    std::mt19937_64* dropout_rng) {
  const auto& fv = graph.value(features);
  if (fv.rank() != 2 || fv.dim(1) != cfg.input_dim) {
    throw DimensionError("tcn input: expected [T, " +
                         std::to_string(cfg.input_dim) + "], got " +
                         nn::shape_string(fv.shape()));
  }
  nn::Var x = features;
  for (std::size_t b = 0; b < cfg.block_count(); ++b) {
    const std::size_t dilation = cfg.block_dilation(b);
    nn::Var h = x;
    for (std::size_t c = 0; c < cfg.convs_per_block; ++c) {
      h = graph.causal_conv1d(h, graph.param(tcn_names::conv_weight(b, c)),
                              graph.param(tcn_names::conv_bias(b, c)),
                              dilation);
      h = graph.relu(h);
      if (cfg.dropout > 0.0 && dropout_rng) {
        h = graph.dropout(h, cfg.dropout, *dropout_rng);
      }
    }
    nn::Var skip = x;
    if (cfg.block_input_dim(b) != cfg.channels) {
      skip = graph.linear(x, graph.param(tcn_names::skip_weight(b)),
                          graph.param(tcn_names::skip_bias(b)));
    }
    x = graph.relu(graph.add(h, skip));
  }
  return x;
}

namespace {

template <typename Scalar>
void residual_relu(const Scalar* h, const Scalar* skip, Scalar* out,
                   std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) {
    const Scalar v = h[i] + skip[i];
    out[i] = v > Scalar(0) ? v : Scalar(0);
  }
}

template <typename Scalar>
void relu_inplace(Scalar* x, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) x[i] = x[i] > Scalar(0) ? x[i] : Scalar(0);
}

}  // namespace

template <typename Scalar>
void TcnEncoder<Scalar>::StreamState::reset() {
  for (auto& b : buffers_) std::fill(b.rows.begin(), b.rows.end(), Scalar(0));
  frames_ = 0;
}

template <typename Scalar>
std::vector<std::size_t> TcnEncoder<Scalar>::StreamState::buffer_capacities()
    const {
  std::vector<std::size_t> out;
  for (const auto& b : buffers_) out.push_back(b.capacity);
  return out;
}

template <typename Scalar>
TcnEncoder<Scalar>::TcnEncoder(const nn::ParamStore& params, TcnConfig cfg)
    : cfg_(std::move(cfg)) {
  cfg_.validate();
  auto load_conv = [&](const std::string& wname, const std::string& bname,
                       std::size_t kernel, std::size_t dilation,
                       std::size_t in, std::size_t out) {
    const auto& w = params.value(wname);
    const auto& b = params.value(bname);
    if (w.size() != kernel * in * out || b.size() != out) {
      throw DimensionError("tcn parameter " + wname + " has shape " +
                           nn::shape_string(w.shape()));
    }
    Conv conv;
    conv.kernel = kernel;
    conv.dilation = dilation;
    conv.in_dim = in;
    conv.out_dim = out;
    conv.weight = w.matrix(kernel * in).template cast<Scalar>();
    conv.bias = b.matrix(1).row(0).template cast<Scalar>();
    return conv;
  };
  for (std::size_t b = 0; b < cfg_.block_count(); ++b) {
    Block block;
    std::size_t in = cfg_.block_input_dim(b);
    for (std::size_t c = 0; c < cfg_.convs_per_block; ++c) {
      block.convs.push_back(load_conv(tcn_names::conv_weight(b, c),
                                      tcn_names::conv_bias(b, c),
                                      cfg_.kernel_size, cfg_.block_dilation(b),
                                      in, cfg_.channels));
      in = cfg_.channels;
    }
    if (cfg_.block_input_dim(b) != cfg_.channels) {
      block.has_projection = true;
      block.projection =
          load_conv(tcn_names::skip_weight(b), tcn_names::skip_bias(b), 1, 1,
                    cfg_.block_input_dim(b), cfg_.channels);
    }
    blocks_.push_back(std::move(block));
  }
}

template <typename Scalar>
void TcnEncoder<Scalar>::conv_kernel(const Conv& conv,
                                     const Scalar* const* taps, Scalar* out) {
  // Plain loops compiled without contraction: every element is the same
  // multiply-then-add sequence whether or not the pointer is aligned, which
  // keeps batch and streaming outputs bit-identical.
  const std::size_t n = conv.out_dim;
  const Scalar* bias = conv.bias.data();
  for (std::size_t c = 0; c < n; ++c) out[c] = bias[c];
  for (std::size_t k = 0; k < conv.kernel; ++k) {
    const Scalar* x = taps[k];
    if (!x) continue;
    const std::size_t base = k * conv.in_dim;
    for (std::size_t r = 0; r < conv.in_dim; ++r) {
      const Scalar xr = x[r];
      const Scalar* __restrict w = conv.weight.row(
          static_cast<Eigen::Index>(base + r)).data();
      Scalar* __restrict o = out;
      for (std::size_t c = 0; c < n; ++c) o[c] += xr * w[c];
    }
  }
}

template <typename Scalar>
typename TcnEncoder<Scalar>::Matrix TcnEncoder<Scalar>::forward(
    const Matrix& features) const {
  if (static_cast<std::size_t>(features.cols()) != cfg_.input_dim) {
    throw DimensionError(shape_message("tcn input width", cfg_.input_dim,
                                       static_cast<std::size_t>(features.cols())));
  }
  const auto steps = static_cast<std::size_t>(features.rows());
  std::vector<const Scalar*> taps(cfg_.kernel_size);
  Matrix x = features;
  for (const auto& block : blocks_) {
    Matrix h = x;
    for (const auto& conv : block.convs) {
      Matrix o(static_cast<Eigen::Index>(steps),
               static_cast<Eigen::Index>(conv.out_dim));
      for (std::size_t t = 0; t < steps; ++t) {
        for (std::size_t k = 0; k < conv.kernel; ++k) {
          const std::size_t lag = (conv.kernel - 1 - k) * conv.dilation;
          taps[k] = t >= lag ? h.row(static_cast<Eigen::Index>(t - lag)).data()
                             : nullptr;
        }
        Scalar* dst = o.row(static_cast<Eigen::Index>(t)).data();
        conv_kernel(conv, taps.data(), dst);
        relu_inplace(dst, conv.out_dim);
      }
      h = std::move(o);
    }
    Matrix out(static_cast<Eigen::Index>(steps),
               static_cast<Eigen::Index>(cfg_.channels));
    AlignedVector<Scalar> skip(cfg_.channels);
    for (std::size_t t = 0; t < steps; ++t) {
      const auto ti = static_cast<Eigen::Index>(t);
      const Scalar* skip_ptr = x.row(ti).data();
      if (block.has_projection) {
        const Scalar* tap = x.row(ti).data();
        conv_kernel(block.projection, &tap, skip.data());
        skip_ptr = skip.data();
      }
      residual_relu(h.row(ti).data(), skip_ptr, out.row(ti).data(),
                    cfg_.channels);
    }
    x = std::move(out);
  }
  return x;
}

template <typename Scalar>
typename TcnEncoder<Scalar>::StreamState TcnEncoder<Scalar>::make_state()
    const {
  StreamState state;
  for (const auto& block : blocks_) {
    for (const auto& conv : block.convs) {
      typename StreamState::ConvBuffer buf;
      buf.capacity = (conv.kernel - 1) * conv.dilation;
      buf.width = conv.in_dim;
      buf.rows.assign(buf.capacity * buf.width, Scalar(0));
      state.buffers_.push_back(std::move(buf));
    }
  }
  const std::size_t width = std::max(cfg_.input_dim, cfg_.channels);
  state.scratch_a_.assign(width, Scalar(0));
  state.scratch_b_.assign(width, Scalar(0));
  state.scratch_c_.assign(width, Scalar(0));
  return state;
}

template <typename Scalar>
void TcnEncoder<Scalar>::stream_step(StreamState& state,
                                     std::span<const Scalar> frame,
                                     std::span<Scalar> out) const {
  if (frame.size() != cfg_.input_dim) {
    throw DimensionError(
        shape_message("stream frame width", cfg_.input_dim, frame.size()));
  }
  if (out.size() != cfg_.channels) {
    throw DimensionError(
        shape_message("stream output width", cfg_.channels, out.size()));
  }
  if (state.buffers_.size() != blocks_.size() * cfg_.convs_per_block) {
    throw StateError("stream state was not created by this encoder");
  }
  const std::size_t t = state.frames_;
  std::vector<const Scalar*> taps(cfg_.kernel_size);

  // block_in holds the current block's input, conv_in/conv_out ping-pong
  // through the convolutions.
  Scalar* block_in = state.scratch_a_.data();
  Scalar* conv_a = state.scratch_b_.data();
  Scalar* conv_b = state.scratch_c_.data();
  std::copy(frame.begin(), frame.end(), block_in);

  std::size_t buf_index = 0;
  for (const auto& block : blocks_) {
    const Scalar* x = block_in;
    Scalar* dst = conv_a;
    for (const auto& conv : block.convs) {
      auto& buf = state.buffers_[buf_index++];
      for (std::size_t k = 0; k + 1 < conv.kernel; ++k) {
        const std::size_t lag = (conv.kernel - 1 - k) * conv.dilation;
        taps[k] = t >= lag
                      ? buf.rows.data() + ((t - lag) % buf.capacity) * buf.width
                      : nullptr;
      }
      taps[conv.kernel - 1] = x;
      conv_kernel(conv, taps.data(), dst);
      if (buf.capacity > 0) {
        std::copy(x, x + conv.in_dim,
                  buf.rows.data() + (t % buf.capacity) * buf.width);
      }
      relu_inplace(dst, conv.out_dim);
      x = dst;
      dst = dst == conv_a ? conv_b : conv_a;
    }
    // `dst` is free scratch now; use it for the projected skip.
    const Scalar* skip_ptr = block_in;
    if (block.has_projection) {
      const Scalar* tap = block_in;
      conv_kernel(block.projection, &tap, dst);
      skip_ptr = dst;
    }
    residual_relu(x, skip_ptr, block_in, cfg_.channels);
  }
  std::copy(block_in, block_in + cfg_.channels, out.begin());
  ++state.frames_;
}

template class TcnEncoder<float>;
template class TcnEncoder<double>;

}  // namespace handmotion
