#include "commands.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <string>
#include <vector>

#include "handmotion/augment.hpp"
#include "handmotion/classify.hpp"
#include "handmotion/errors.hpp"
#include "handmotion/features.hpp"
#include "handmotion/model.hpp"
#include "handmotion/skeleton_io.hpp"
#include "handmotion/synth.hpp"
#include "handmotion/train.hpp"
#include "run_config.hpp"

namespace handmotion::tools {

namespace fs = std::filesystem;

namespace {

std::string fixed(double v, int digits = 4) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.*f", digits, v);
  return buf;
}

void require_dir(const fs::path& dir, const std::string& what) {
  if (dir.empty()) throw UsageError(what + " is required");
  if (!fs::is_directory(dir)) {
    throw UsageError(what + " is not a directory: " + dir.string());
  }
}

void require_file(const fs::path& file, const std::string& what) {
  if (file.empty()) throw UsageError(what + " is required");
  if (!fs::is_regular_file(file)) {
    throw UsageError(what + " not found: " + file.string());
  }
}

JointMap joint_map_named(const std::string& name) {
  try {
    return resolve_joint_map(name);
  } catch (const DataError& e) {
    throw UsageError("joint map '" + name + "': " + e.what());
  }
}

std::vector<MotionSequence> load_simplified(const fs::path& dir,
                                            const JointMap& map) {
  std::vector<MotionSequence> out;
  for (const auto& s : read_skq_corpus(dir)) out.push_back(simplify(s, map));
  if (out.empty()) throw DatasetError("no .skq files in " + dir.string());
  return out;
}

std::vector<LabeledDescriptor> embed_sequences(
    const InferenceModel<float>& model,
    const std::vector<MotionSequence>& simplified, bool last_frame) {
  const JointMap identity = JointMap::identity();
  const std::size_t stride = model.config().frame_stride;
  std::vector<LabeledDescriptor> out;
  out.reserve(simplified.size());
  for (const auto& s : simplified) {
    if (!s.label) {
      throw DatasetError("sequence '" + s.source_id.value_or("?") +
                         "' has no label");
    }
    const auto f = model_features(s, identity, stride);
    const auto d = last_frame ? model.last_descriptor(f) : model.summary(f);
    out.push_back({d.cast<double>(), *s.label});
  }
  return out;
}

ReferenceSet load_references(const fs::path& refs,
                             const InferenceModel<float>& model,
                             const JointMap& map, std::size_t multiplier,
                             std::uint64_t seed) {
  if (fs::is_regular_file(refs)) return to_reference_set(read_dsc(refs));
  require_dir(refs, "reference set");
  auto seqs = load_simplified(refs, map);
  if (multiplier > 1) {
    seqs = augment_reference_set(seqs, multiplier, AugmentConfig{}, seed);
  }
  return to_reference_set(embed_sequences(model, seqs, false));
}

std::string flat_name(const fs::path& relative) {
  std::string name = relative.parent_path().generic_string();
  std::replace(name.begin(), name.end(), '/', '_');
  const std::string stem = relative.stem().string();
  return name.empty() ? stem : name + "_" + stem;
}

void write_manifest(const fs::path& out_dir,
                    const std::map<std::string, std::size_t>& counts) {
  std::ofstream m(out_dir / "manifest.tsv");
  std::size_t total = 0;
  m << "label\tcount\n";
  for (const auto& [label, n] : counts) {
    m << label << '\t' << n << '\n';
    total += n;
  }
  m << "total\t" << total << '\n';
  if (!m) throw DataError("cannot write manifest in " + out_dir.string());
}

}  // namespace

int cmd_prep(const PrepOptions& opt, std::ostream& out, std::ostream& err) {
  require_dir(opt.input, "input");
  if (opt.out.empty()) throw UsageError("output directory is required");
  const JointMap map = joint_map_named(opt.joint_map);
  const bool skq = opt.format == "skq";
  DatasetLayout layout;
  if (!skq) {
    try {
      layout = resolve_dataset_layout(opt.format);
    } catch (const DataError& e) {
      throw UsageError("format '" + opt.format + "': " + e.what());
    }
  }

  std::vector<fs::path> files;
  for (const auto& entry : fs::recursive_directory_iterator(opt.input)) {
    if (!entry.is_regular_file()) continue;
    const fs::path& p = entry.path();
    const bool match =
        skq ? p.extension() == ".skq"
            : (layout.file_name.empty() ? p.extension() == layout.extension
                                        : p.filename() == layout.file_name);
    if (match) files.push_back(p);
  }
  std::sort(files.begin(), files.end());
  fs::create_directories(opt.out);

  std::map<std::string, std::size_t> counts;
  std::vector<std::pair<std::string, std::string>> failures;
  for (const auto& file : files) {
    const fs::path rel = fs::relative(file, opt.input);
    try {
      MotionSequence seq = skq ? read_skq(file)
                               : read_native_sequence(file, rel, layout);
      seq = simplify(seq, map);
      seq.validate_for_features();
      if (!seq.label) throw DatasetError("no label");
      seq.source_id = flat_name(rel);
      write_skq(opt.out / (*seq.source_id + ".skq"), seq);
      ++counts[*seq.label];
    } catch (const DataError& e) {
      failures.emplace_back(rel.generic_string(), e.what());
    }
  }
  write_manifest(opt.out, counts);
  if (files.empty()) {
    err << "warning: no input sequences found in " << opt.input.string()
        << '\n';
  }
  if (!failures.empty()) {
    std::ofstream report(opt.out / "errors.tsv");
    for (const auto& [file, what] : failures) {
      report << file << '\t' << what << '\n';
      err << "error: " << file << ": " << what << '\n';
    }
  }
  out << "prepared " << files.size() - failures.size() << " of "
      << files.size() << " sequences into " << opt.out.string() << '\n';
  return failures.empty() ? 0 : 2;
}

int cmd_synth(const SynthOptions& opt, std::ostream& out) {
  if (opt.out.empty()) throw UsageError("output directory is required");
  std::vector<GestureFamily> families;
  if (opt.family == "all") {
    families.assign(std::begin(kAllFamilies), std::end(kAllFamilies));
  } else {
    std::string list = opt.family;
    std::size_t start = 0;
    while (start <= list.size()) {
      const auto comma = list.find(',', start);
      families.push_back(family_from_name(list.substr(
          start, comma == std::string::npos ? std::string::npos
                                            : comma - start)));
      if (comma == std::string::npos) break;
      start = comma + 1;
    }
  }
  fs::create_directories(opt.out);
  std::size_t written = 0;
  for (auto family : families) {
    GestureSpec spec;
    spec.family = family;
    spec.seed = opt.seed;
    spec.noise_sigma = opt.noise;
    spec.duration_min = opt.duration_min;
    spec.duration_max = opt.duration_max;
    spec.amplitude_min = opt.amplitude_min;
    spec.amplitude_max = opt.amplitude_max;
    for (const auto& s : generate(spec, opt.count)) {
      write_skq(opt.out / (*s.source_id + ".skq"), s);
      ++written;
    }
  }
  out << "wrote " << written << " sequences to " << opt.out.string() << '\n';
  return 0;
}

int cmd_train(const TrainOptions& opt, std::ostream& out) {
  RunConfig rc = RunConfig::load(opt.config);
  if (opt.epochs) rc.train.epochs = *opt.epochs;
  const fs::path checkpoint = opt.checkpoint.empty() ? rc.checkpoint
                                                     : opt.checkpoint;
  if (checkpoint.empty()) {
    throw UsageError("no checkpoint path (paths.checkpoint or --out)");
  }
  require_dir(rc.dataset, "paths.dataset");
  if (checkpoint.has_parent_path()) {
    fs::create_directories(checkpoint.parent_path());
  }

  const JointMap map = rc.resolved_joint_map();
  const auto corpus = read_skq_corpus(rc.dataset);
  const CorpusSplit split = split_corpus(corpus, rc.split, rc.train.seed);
  const Dataset data = Dataset::from_sequences(split.train, map);

  TrainConfig cfg = rc.train;
  cfg.checkpoint_path = checkpoint;
  cfg.diagnostic_path = checkpoint.string() + ".diag";

  std::ofstream log_file;
  if (!opt.log.empty()) {
    log_file.open(opt.log);
    if (!log_file) throw UsageError("cannot write log " + opt.log.string());
  }
  std::ostream& log = opt.log.empty() ? out : log_file;
  const FitResult r = fit(data, cfg, rc.model, [&](const EpochRecord& e) {
    log << to_log_line(e) << '\n' << std::flush;
  });
  save_model(checkpoint, r.best);
  out << "# trained on " << data.size() << " sequences, "
      << data.class_count() << " classes, " << r.log.size()
      << " epochs; checkpoint " << checkpoint.string() << '\n';
  return 0;
}

int cmd_embed(const EmbedOptions& opt, std::ostream& out) {
  require_file(opt.checkpoint, "checkpoint");
  require_dir(opt.corpus, "corpus");
  if (opt.out.empty()) throw UsageError("output file is required");
  if (opt.augment < 1) throw UsageError("--augment must be >= 1");
  const ModelParams params = load_model(opt.checkpoint);
  const InferenceModel<float> model(params);
  const JointMap map = joint_map_named(params.config.joint_map);
  auto seqs = load_simplified(opt.corpus, map);
  if (opt.augment > 1) {
    seqs = augment_reference_set(seqs, opt.augment, AugmentConfig{}, opt.seed);
  }
  const auto rows = embed_sequences(model, seqs, opt.last_frame);
  write_dsc(opt.out, rows);
  out << "wrote " << rows.size() << " descriptors to " << opt.out.string()
      << '\n';
  return 0;
}

int cmd_eval(const EvalOptions& opt, std::ostream& out) {
  require_file(opt.checkpoint, "checkpoint");
  require_dir(opt.targets, "targets");
  if (opt.mode != "linear" && opt.mode != "knn") {
    throw UsageError("--mode must be linear or knn, got '" + opt.mode + "'");
  }
  if (opt.mode == "knn" && opt.refs.empty()) {
    throw UsageError("knn mode needs --refs");
  }
  const ModelParams params = load_model(opt.checkpoint);
  const InferenceModel<float> model(params);
  const JointMap map = joint_map_named(params.config.joint_map);
  const auto targets =
      embed_sequences(model, load_simplified(opt.targets, map), false);

  if (opt.mode == "linear") {
    if (!model.has_classifier()) {
      throw UsageError("checkpoint has no classifier head; use --mode knn");
    }
    out << "mode\tk\tn\taccuracy\n";
    std::size_t correct = 0;
    for (const auto& t : targets) {
      const auto p = linear_classify(t.descriptor, model.linear_head(),
                                     params.config.class_names);
      correct += p.top_label() == t.label;
    }
    out << "linear\t-\t" << targets.size() << '\t'
        << fixed(static_cast<double>(correct) /
                 static_cast<double>(targets.size()))
        << '\n';
    return 0;
  }
  const ReferenceSet refs =
      load_references(opt.refs, model, map, opt.augment, opt.seed);
  out << "mode\tk\tn\taccuracy\n";
  if (opt.k > 0) {
    out << "knn\t" << opt.k << '\t' << targets.size() << '\t'
        << fixed(knn_accuracy(targets, refs, opt.k)) << '\n';
    return 0;
  }
  const KSweepResult sweep = sweep_k(targets, refs);
  for (const auto& row : sweep.table) {
    out << "knn\t" << row.k << '\t' << targets.size() << '\t'
        << fixed(row.accuracy) << '\n';
  }
  out << "best\t" << sweep.best_k << '\t' << targets.size() << '\t'
      << fixed(sweep.best_accuracy) << '\n';
  return 0;
}

int cmd_stream(const StreamOptions& opt, std::istream& in, std::ostream& out) {
  require_file(opt.checkpoint, "checkpoint");
  const ModelParams params = load_model(opt.checkpoint);
  const InferenceModel<float> model(params);
  const JointMap map = joint_map_named(
      opt.joint_map.empty() ? params.config.joint_map : opt.joint_map);
  if (opt.refs.empty()) throw UsageError("--refs is required");
  const ReferenceSet refs = load_references(opt.refs, model, map, 1, 0);
  if (opt.k < 1 || opt.k > refs.size()) {
    throw UsageError("--k must lie in [1, " + std::to_string(refs.size()) +
                     "]");
  }
  const std::size_t joints = map.source_joint_count();
  auto emit = [&](std::size_t t, const ClassProbabilities& p) {
    out << t << '\t' << p.top_label() << '\t' << fixed(p.top_probability(), 6)
        << '\n';
  };

  std::string line;
  std::size_t line_no = 0;
  auto next_frame = [&](HandSkeleton& frame) {
    while (std::getline(in, line)) {
      ++line_no;
      if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
      try {
        frame = parse_frame_line(line, joints);
      } catch (const DataError& e) {
        throw ParseError("stdin line " + std::to_string(line_no) + ": " +
                         e.what());
      }
      return true;
    }
    return false;
  };

  if (!opt.offline) {
    StreamingClassifier stream(model, refs, opt.k, map);
    HandSkeleton frame;
    while (next_frame(frame)) {
      const auto step = stream.push(frame);
      emit(step.t, step.probabilities);
      out.flush();
    }
    return 0;
  }

  MotionSequence seq;
  HandSkeleton frame;
  while (next_frame(frame)) seq.frames.push_back(frame);
  if (seq.frames.empty()) return 0;
  const StreamResult r = classify_stream(seq, model, refs, opt.k, map);
  const std::size_t total = seq.frames.size();
  const std::size_t stride =
      r.frames.size() == total ? 1 : model.config().frame_stride;
  for (std::size_t t = 0; t < total; ++t) emit(t, r.frames.at(t / stride));
  return 0;
}

}  // namespace handmotion::tools
