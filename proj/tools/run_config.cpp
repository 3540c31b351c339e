#include "run_config.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <random>

#include "handmotion/errors.hpp"

namespace handmotion::tools {

namespace fs = std::filesystem;

namespace {

std::size_t get_size(const KeyValueConfig& kv, const std::string& key,
                     std::size_t fallback) {
  const long long v = kv.get_int(key, static_cast<long long>(fallback));
  if (v < 0) throw UsageError("config key " + key + " must be >= 0");
  return static_cast<std::size_t>(v);
}

fs::path get_path(const KeyValueConfig& kv, const std::string& key,
                  const fs::path& base_dir) {
  const std::string v = kv.get_string(key, "");
  if (v.empty()) return {};
  fs::path p(v);
  return p.is_absolute() ? p : base_dir / p;
}

void parse_ratio(const std::string& text, SplitSpec& spec) {
  const auto colon = text.find(':');
  try {
    if (colon == std::string::npos) throw std::invalid_argument(text);
    spec.train_parts = std::stod(text.substr(0, colon));
    spec.test_parts = std::stod(text.substr(colon + 1));
  } catch (const std::logic_error&) {
    throw UsageError("split ratio must look like 3:1, got '" + text + "'");
  }
}

std::vector<std::string> id_tokens(const std::string& id) {
  std::vector<std::string> out(1);
  for (char c : id) {
    if (c == '_' || c == '/') {
      out.emplace_back();
    } else {
      out.back() += c;
    }
  }
  return out;
}

}  // namespace

void SplitSpec::validate() const {
  if (mode == Mode::kRatio &&
      !(train_parts > 0.0 && test_parts >= 0.0 && std::isfinite(train_parts) &&
        std::isfinite(test_parts))) {
    throw UsageError("split ratio parts must be positive");
  }
  if (mode == Mode::kLeaveOneSubjectOut && holdout.empty()) {
    throw UsageError("leave-one-subject-out split needs split.holdout");
  }
}

RunConfig RunConfig::from_key_values(const KeyValueConfig& kv,
                                     const fs::path& base_dir) {
  RunConfig rc;
  try {
    rc.dataset = get_path(kv, "paths.dataset", base_dir);
    rc.checkpoint = get_path(kv, "paths.checkpoint", base_dir);
    rc.output_dir = get_path(kv, "paths.output_dir", base_dir);
    rc.joint_map = kv.get_string("paths.joint_map", rc.joint_map);

    auto& tcn = rc.model.tcn;
    tcn.channels = get_size(kv, "tcn.channels", tcn.channels);
    tcn.kernel_size = get_size(kv, "tcn.kernel_size", tcn.kernel_size);
    tcn.num_stacks = get_size(kv, "tcn.stacks", tcn.num_stacks);
    tcn.convs_per_block =
        get_size(kv, "tcn.convs_per_block", tcn.convs_per_block);
    tcn.dropout = kv.get_double("tcn.dropout", tcn.dropout);
    tcn.activation = kv.get_string("tcn.activation", tcn.activation);
    std::vector<double> dil(tcn.dilations.begin(), tcn.dilations.end());
    dil = kv.get_doubles("tcn.dilations", dil);
    tcn.dilations.clear();
    for (double d : dil) {
      if (d < 1 || d != std::floor(d)) {
        throw UsageError("tcn.dilations must be positive integers");
      }
      tcn.dilations.push_back(static_cast<std::size_t>(d));
    }

    auto& summ = rc.model.summarizer;
    summ.input_dim = tcn.channels;
    summ.reduced_dim = get_size(kv, "summarizer.reduced_dim", summ.reduced_dim);
    summ.max_frames = get_size(kv, "summarizer.max_frames", summ.max_frames);
    summ.perceptron_size =
        get_size(kv, "summarizer.perceptron_size", summ.max_frames);
    rc.model.frame_stride =
        get_size(kv, "model.frame_stride", rc.model.frame_stride);

    auto& tr = rc.train;
    tr.regime = regime_from_name(kv.get_string("train.regime", "intra"));
    tr.temperature = kv.get_double("train.temperature", tr.temperature);
    tr.epochs = get_size(kv, "train.epochs", tr.epochs);
    tr.learning_rate = kv.get_double("train.learning_rate", tr.learning_rate);
    tr.seed = get_size(kv, "train.seed", tr.seed);
    if (kv.has("train.target_accuracy")) {
      tr.target_accuracy = kv.get_double("train.target_accuracy", 1.0);
    }
    tr.eval_every = get_size(kv, "train.eval_every", tr.eval_every);
    tr.patience = get_size(kv, "train.patience", tr.patience);

    auto& aug = tr.augment;
    aug.speed_min = kv.get_double("augment.speed_min", aug.speed_min);
    aug.speed_max = kv.get_double("augment.speed_max", aug.speed_max);
    aug.skip_stride = get_size(kv, "augment.skip_stride", aug.skip_stride);
    aug.max_len = get_size(kv, "augment.max_len", aug.max_len);
    aug.coord_noise_sigma =
        kv.get_double("augment.coord_noise_sigma", aug.coord_noise_sigma);
    aug.small_rot_max =
        kv.get_double("augment.small_rot_max_deg",
                      aug.small_rot_max * 180.0 / std::numbers::pi) *
        std::numbers::pi / 180.0;
    aug.full_rotation = kv.get_bool("augment.full_rotation", aug.full_rotation);
    aug.seed = tr.seed;

    const std::string mode = kv.get_string("split.mode", "none");
    if (mode == "none") {
      rc.split.mode = SplitSpec::Mode::kNone;
    } else if (mode == "ratio") {
      rc.split.mode = SplitSpec::Mode::kRatio;
      parse_ratio(kv.get_string("split.ratio", "1:1"), rc.split);
    } else if (mode == "loso") {
      rc.split.mode = SplitSpec::Mode::kLeaveOneSubjectOut;
      rc.split.subject_token = get_size(kv, "split.subject_token", 0);
      rc.split.holdout = kv.get_string("split.holdout", "");
    } else {
      throw UsageError("split.mode must be none, ratio or loso, got '" + mode +
                       "'");
    }

    rc.eval_k = get_size(kv, "eval.k", rc.eval_k);
    rc.reference_multiplier =
        get_size(kv, "eval.reference_multiplier", rc.reference_multiplier);
  } catch (const ParseError& e) {
    throw UsageError(e.what());
  }

  const auto unread = kv.unread_keys();
  if (!unread.empty()) {
    std::string keys;
    for (const auto& k : unread) keys += (keys.empty() ? "" : ", ") + k;
    throw UsageError("unknown config keys: " + keys);
  }
  rc.model.validate();
  rc.train.validate();
  rc.split.validate();
  if (rc.reference_multiplier < 1) {
    throw UsageError("eval.reference_multiplier must be >= 1");
  }
  if (!rc.dataset.empty() && !fs::is_directory(rc.dataset)) {
    throw UsageError("paths.dataset does not exist: " + rc.dataset.string());
  }
  rc.resolved_joint_map();
  rc.model.joint_map = rc.joint_map;
  return rc;
}

RunConfig RunConfig::load(const fs::path& path) {
  if (!fs::exists(path)) {
    throw UsageError("config file not found: " + path.string());
  }
  KeyValueConfig kv;
  try {
    kv = KeyValueConfig::load(path.string());
  } catch (const ParseError& e) {
    throw UsageError(e.what());
  }
  return from_key_values(kv, path.parent_path());
}

JointMap RunConfig::resolved_joint_map() const {
  try {
    return resolve_joint_map(joint_map);
  } catch (const DataError& e) {
    throw UsageError("joint map '" + joint_map + "': " + e.what());
  }
}

CorpusSplit split_corpus(const std::vector<MotionSequence>& corpus,
                         const SplitSpec& spec, std::uint64_t seed) {
  spec.validate();
  CorpusSplit out;
  switch (spec.mode) {
    case SplitSpec::Mode::kNone:
      out.train = corpus;
      return out;
    case SplitSpec::Mode::kLeaveOneSubjectOut:
      for (const auto& s : corpus) {
        const auto tokens = id_tokens(s.source_id.value_or(""));
        const bool held = spec.subject_token < tokens.size() &&
                          tokens[spec.subject_token] == spec.holdout;
        (held ? out.test : out.train).push_back(s);
      }
      return out;
    case SplitSpec::Mode::kRatio:
      break;
  }
  std::map<std::string, std::vector<std::size_t>> by_label;
  for (std::size_t i = 0; i < corpus.size(); ++i) {
    by_label[corpus[i].label.value_or("")].push_back(i);
  }
  std::mt19937_64 rng(seed);
  const double fraction = spec.train_parts / (spec.train_parts + spec.test_parts);
  for (auto& [label, idx] : by_label) {
    std::shuffle(idx.begin(), idx.end(), rng);
    const auto n_train = static_cast<std::size_t>(
        std::llround(fraction * static_cast<double>(idx.size())));
    std::sort(idx.begin(), idx.begin() + static_cast<std::ptrdiff_t>(n_train));
    std::sort(idx.begin() + static_cast<std::ptrdiff_t>(n_train), idx.end());
    for (std::size_t i = 0; i < idx.size(); ++i) {
      (i < n_train ? out.train : out.test).push_back(corpus[idx[i]]);
    }
  }
  return out;
}

}  // namespace handmotion::tools
