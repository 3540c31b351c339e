#ifndef HANDMOTION_TOOLS_COMMANDS_HPP_
#define HANDMOTION_TOOLS_COMMANDS_HPP_

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>

namespace handmotion::tools {

struct PrepOptions {
  std::filesystem::path input;
  // Dataset layout name or file, or "skq" for an existing .skq corpus.
  std::string format = "skq";
  std::string joint_map = "simplified7";
  std::filesystem::path out;
};

struct SynthOptions {
  std::string family = "all";
  std::size_t count = 10;
  std::uint64_t seed = 0;
  double noise = 0.02;
  std::size_t duration_min = 30;
  std::size_t duration_max = 60;
  double amplitude_min = 2.0;
  double amplitude_max = 4.0;
  std::filesystem::path out;
};

struct TrainOptions {
  std::filesystem::path config;
  std::optional<std::size_t> epochs;
  std::filesystem::path checkpoint;  // overrides paths.checkpoint
  std::filesystem::path log;         // JSON lines; stdout when empty
};

struct EmbedOptions {
  std::filesystem::path checkpoint;
  std::filesystem::path corpus;
  std::filesystem::path out;
  bool last_frame = false;
  std::size_t augment = 1;  // reference multiplier
  std::uint64_t seed = 0;
};

struct EvalOptions {
  std::filesystem::path checkpoint;
  std::filesystem::path targets;
  std::string mode = "knn";
  std::filesystem::path refs;  // .dsc file or .skq corpus
  std::size_t k = 0;           // 0 sweeps
  std::size_t augment = 1;
  std::uint64_t seed = 0;
};

struct StreamOptions {
  std::filesystem::path checkpoint;
  std::filesystem::path refs;
  std::size_t k = 5;
  std::string joint_map;  // defaults to the checkpoint's
  bool offline = false;
};

// Each returns the process exit code; errors propagate as exceptions.
int cmd_prep(const PrepOptions& opt, std::ostream& out, std::ostream& err);
int cmd_synth(const SynthOptions& opt, std::ostream& out);
int cmd_train(const TrainOptions& opt, std::ostream& out);
int cmd_embed(const EmbedOptions& opt, std::ostream& out);
int cmd_eval(const EvalOptions& opt, std::ostream& out);
int cmd_stream(const StreamOptions& opt, std::istream& in, std::ostream& out);

}  // namespace handmotion::tools

#endif  // HANDMOTION_TOOLS_COMMANDS_HPP_
