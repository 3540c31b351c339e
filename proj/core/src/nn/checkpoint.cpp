#include "handmotion/nn/checkpoint.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>

#include "handmotion/errors.hpp"

namespace handmotion::nn {

namespace {

// Sanity bound on string and tensor sizes read from disk.
constexpr std::uint32_t kMaxLength = 1u << 30;

void put_u32(std::ostream& out, std::uint32_t v) {
  const unsigned char bytes[4] = {
      static_cast<unsigned char>(v), static_cast<unsigned char>(v >> 8),
      static_cast<unsigned char>(v >> 16), static_cast<unsigned char>(v >> 24)};
  out.write(reinterpret_cast<const char*>(bytes), 4);
}

void put_string(std::ostream& out, const std::string& s) {
  put_u32(out, static_cast<std::uint32_t>(s.size()));
  out.write(s.data(), static_cast<std::streamsize>(s.size()));
}

std::uint32_t get_u32(std::istream& in) {
  unsigned char bytes[4];
  if (!in.read(reinterpret_cast<char*>(bytes), 4)) {
    throw ParseError("checkpoint truncated");
  }
  return static_cast<std::uint32_t>(bytes[0]) |
         (static_cast<std::uint32_t>(bytes[1]) << 8) |
         (static_cast<std::uint32_t>(bytes[2]) << 16) |
         (static_cast<std::uint32_t>(bytes[3]) << 24);
}

std::string get_string(std::istream& in) {
  const auto len = get_u32(in);
  if (len > kMaxLength) throw ParseError("checkpoint string too long");
  std::string s(len, '\0');
  if (!in.read(s.data(), len)) throw ParseError("checkpoint truncated");
  return s;
}

}  // namespace

const std::string* Checkpoint::find(const std::string& key) const {
  for (const auto& [k, v] : config) {
    if (k == key) return &v;
  }
  return nullptr;
}

void save_checkpoint(std::ostream& out, const ConfigBlock& config,
                     const ParamStore& params) {
  out.write(kCheckpointMagic, 4);
  put_u32(out, kCheckpointVersion);
  put_u32(out, static_cast<std::uint32_t>(config.size()));
  for (const auto& [k, v] : config) {
    put_string(out, k);
    put_string(out, v);
  }
  put_u32(out, static_cast<std::uint32_t>(params.size()));
  for (const auto& e : params.entries()) {
    put_string(out, e.name);
    put_u32(out, static_cast<std::uint32_t>(e.value.rank()));
    for (auto d : e.value.shape()) put_u32(out, static_cast<std::uint32_t>(d));
    for (double v : e.value.values()) {
      put_u32(out, std::bit_cast<std::uint32_t>(static_cast<float>(v)));
    }
  }
  if (!out) throw DataError("checkpoint write failed");
}

void save_checkpoint(const std::filesystem::path& path,
                     const ConfigBlock& config, const ParamStore& params) {
  if (path.has_parent_path()) {
    std::filesystem::create_directories(path.parent_path());
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write checkpoint " + path.string());
  save_checkpoint(out, config, params);
}

Checkpoint load_checkpoint(std::istream& in) {
  char magic[4];
  if (!in.read(magic, 4) || std::memcmp(magic, kCheckpointMagic, 4) != 0) {
    throw ParseError("not an HMDL checkpoint");
  }
  const auto version = get_u32(in);
  if (version != kCheckpointVersion) {
    throw ParseError("unsupported checkpoint version " +
                     std::to_string(version));
  }
  Checkpoint ckpt;
  const auto n_config = get_u32(in);
  if (n_config > kMaxLength) throw ParseError("checkpoint config too large");
  for (std::uint32_t i = 0; i < n_config; ++i) {
    auto key = get_string(in);
    auto value = get_string(in);
    ckpt.config.emplace_back(std::move(key), std::move(value));
  }
  const auto n_tensors = get_u32(in);
  if (n_tensors > kMaxLength) throw ParseError("checkpoint tensor table too large");
  for (std::uint32_t i = 0; i < n_tensors; ++i) {
    auto name = get_string(in);
    const auto rank = get_u32(in);
    if (rank > 8) throw ParseError("checkpoint tensor rank too large");
    Shape shape(rank);
    std::size_t count = 1;
    for (auto& d : shape) {
      d = get_u32(in);
      count *= d;
      if (count > kMaxLength) throw ParseError("checkpoint tensor too large");
    }
    std::vector<double> data(count);
    for (auto& v : data) {
      v = static_cast<double>(std::bit_cast<float>(get_u32(in)));
    }
    ckpt.params.add(name, Tensor(std::move(shape), std::move(data)));
  }
  return ckpt;
}

Checkpoint load_checkpoint(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open checkpoint " + path.string());
  try {
    return load_checkpoint(in);
  } catch (const ParseError& e) {
    throw ParseError(path.string() + ": " + e.what());
  }
}

}  // namespace handmotion::nn
