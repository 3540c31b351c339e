#ifndef HANDMOTION_NN_CHECKPOINT_HPP_
#define HANDMOTION_NN_CHECKPOINT_HPP_

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "handmotion/nn/tensor.hpp"

namespace handmotion::nn {

inline constexpr char kCheckpointMagic[4] = {'H', 'M', 'D', 'L'};
inline constexpr std::uint32_t kCheckpointVersion = 1;

using ConfigBlock = std::vector<std::pair<std::string, std::string>>;

// Binary layout, all integers little-endian u32:
//   "HMDL" | version | n_config | (len key, len value)* | n_tensors |
//   (len name, rank, dims..., float32 data)*
// Values are rounded to float32 on save; a load/save cycle is bit-exact.
struct Checkpoint {
  ConfigBlock config;
  ParamStore params;

  const std::string* find(const std::string& key) const;
};

void save_checkpoint(std::ostream& out, const ConfigBlock& config,
                     const ParamStore& params);
void save_checkpoint(const std::filesystem::path& path,
                     const ConfigBlock& config, const ParamStore& params);
Checkpoint load_checkpoint(std::istream& in);
Checkpoint load_checkpoint(const std::filesystem::path& path);

}  // namespace handmotion::nn

#endif  // HANDMOTION_NN_CHECKPOINT_HPP_
