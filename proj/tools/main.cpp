#include <exception>
#include <iostream>

#include <CLI11.hpp>

#include "commands.hpp"
#include "handmotion/errors.hpp"

namespace {

using namespace handmotion::tools;

constexpr int kExitUsage = 1;
constexpr int kExitData = 2;
constexpr int kExitNumerical = 3;

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Skeleton-based hand action recognition"};
  app.require_subcommand(1);

  PrepOptions prep;
  auto* prep_cmd = app.add_subcommand(
      "prep", "Convert a native or .skq corpus to simplified .skq files");
  prep_cmd->add_option("--input", prep.input, "Corpus directory")->required();
  prep_cmd->add_option("--format", prep.format,
                       "Dataset layout name or file, or 'skq'");
  prep_cmd->add_option("--joint-map", prep.joint_map, "Joint map name or file");
  prep_cmd->add_option("--out", prep.out, "Output directory")->required();

  SynthOptions synth;
  auto* synth_cmd =
      app.add_subcommand("synth", "Generate a synthetic labeled corpus");
  synth_cmd->add_option("--family", synth.family,
                        "Comma-separated families or 'all'");
  synth_cmd->add_option("--count", synth.count, "Sequences per family");
  synth_cmd->add_option("--seed", synth.seed);
  synth_cmd->add_option("--noise", synth.noise,
                        "Coordinate noise in palm lengths");
  synth_cmd->add_option("--duration-min", synth.duration_min);
  synth_cmd->add_option("--duration-max", synth.duration_max);
  synth_cmd->add_option("--amplitude-min", synth.amplitude_min);
  synth_cmd->add_option("--amplitude-max", synth.amplitude_max);
  synth_cmd->add_option("--out", synth.out, "Output directory")->required();

  TrainOptions train;
  std::size_t epochs = 0;
  auto* train_cmd = app.add_subcommand("train", "Train a model");
  train_cmd->add_option("--config", train.config, "Run configuration file")
      ->required()
      ->check(CLI::ExistingFile);
  auto* epochs_opt =
      train_cmd->add_option("--epochs", epochs, "Override train.epochs");
  train_cmd->add_option("--out", train.checkpoint, "Checkpoint path");
  train_cmd->add_option("--log", train.log, "JSON-lines log file");

  EmbedOptions embed;
  auto* embed_cmd =
      app.add_subcommand("embed", "Write descriptors for a .skq corpus");
  embed_cmd->add_option("--checkpoint", embed.checkpoint)->required();
  embed_cmd->add_option("--corpus", embed.corpus)->required();
  embed_cmd->add_option("--out", embed.out, ".dsc output file")->required();
  embed_cmd->add_flag("--last-frame", embed.last_frame,
                      "Use the last per-frame descriptor instead of the "
                      "summary");
  embed_cmd->add_option("--augment", embed.augment,
                        "Reference multiplier (1 = none)");
  embed_cmd->add_option("--seed", embed.seed);

  EvalOptions eval;
  auto* eval_cmd = app.add_subcommand("eval", "Evaluate on a target corpus");
  eval_cmd->add_option("--checkpoint", eval.checkpoint)->required();
  eval_cmd->add_option("--targets", eval.targets)->required();
  eval_cmd->add_option("--mode", eval.mode, "linear or knn")
      ->check(CLI::IsMember({"linear", "knn"}));
  eval_cmd->add_option("--refs", eval.refs, ".dsc file or .skq corpus");
  eval_cmd->add_option("--k", eval.k, "Neighbours (0 sweeps)");
  eval_cmd->add_option("--augment", eval.augment,
                       "Reference multiplier for a .skq reference corpus");
  eval_cmd->add_option("--seed", eval.seed);

  StreamOptions stream;
  auto* stream_cmd = app.add_subcommand(
      "stream", "Classify frames read from stdin, one line per frame");
  stream_cmd->add_option("--checkpoint", stream.checkpoint)->required();
  stream_cmd->add_option("--refs", stream.refs, ".dsc file or .skq corpus")
      ->required();
  stream_cmd->add_option("--k", stream.k);
  stream_cmd->add_option("--joint-map", stream.joint_map,
                         "Layout of the incoming frames");
  stream_cmd->add_flag("--offline", stream.offline,
                       "Classify the whole input in one batch pass");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitUsage;
  }

  try {
    if (*prep_cmd) return cmd_prep(prep, std::cout, std::cerr);
    if (*synth_cmd) return cmd_synth(synth, std::cout);
    if (*train_cmd) {
      if (*epochs_opt) train.epochs = epochs;
      return cmd_train(train, std::cout);
    }
    if (*embed_cmd) return cmd_embed(embed, std::cout);
    if (*eval_cmd) return cmd_eval(eval, std::cout);
    if (*stream_cmd) return cmd_stream(stream, std::cin, std::cout);
  } catch (const handmotion::UsageError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const handmotion::DataError& e) {
    std::cerr << "data error: " << e.what() << '\n';
    return kExitData;
  } catch (const handmotion::NumericalError& e) {
    std::cerr << "numerical error: " << e.what() << '\n';
    return kExitNumerical;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitData;
  }
  return kExitUsage;
}
