#include "handmotion/train.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <limits>
#include <map>
#include <set>
#include <sstream>

#include "handmotion/errors.hpp"
#include "handmotion/nn/adam.hpp"
#include "handmotion/nn/graph.hpp"
#include "text_util.hpp"

namespace handmotion {

namespace {

constexpr std::uint64_t kBatchStream = 0x6261746368ULL;
constexpr std::uint64_t kDropoutStream = 0x64726f70ULL;

double param_norm(const nn::Tensor& t) {
  double s = 0.0;
  for (double v : t.values()) s += v * v;
  return std::sqrt(s);
}

void write_diagnostic(const std::filesystem::path& path,
                      const std::string& reason, std::size_t epoch,
                      std::size_t iteration,
                      const std::vector<double>& recent_losses,
                      const nn::ParamStore& params) {
  if (path.empty()) return;
  std::ofstream out(path);
  if (!out) return;
  out << "reason: " << reason << '\n';
  out << "epoch: " << epoch << "\niteration: " << iteration << '\n';
  out << "recent_losses:";
  for (double l : recent_losses) out << ' ' << detail::format_double(l);
  out << '\n';
  for (const auto& e : params.entries()) {
    out << e.name << " shape=" << nn::shape_string(e.value.shape())
        << " norm=" << detail::format_double(param_norm(e.value))
        << " grad_norm=" << detail::format_double(param_norm(e.grad))
        << " finite=" << (e.value.all_finite() ? "yes" : "no") << '\n';
  }
}

}  // namespace

std::string_view regime_name(Regime regime) {
  return regime == Regime::kIntra ? "intra" : "cross";
}

Regime regime_from_name(std::string_view name) {
  if (name == "intra") return Regime::kIntra;
  if (name == "cross") return Regime::kCross;
  throw UsageError("unknown regime '" + std::string(name) +
                   "' (expected intra or cross)");
}

Dataset Dataset::from_sequences(const std::vector<MotionSequence>& raw,
                                const JointMap& map) {
  Dataset ds;
  std::set<std::string> names;
  for (const auto& seq : raw) {
    if (!seq.label || seq.label->empty()) {
      throw DatasetError("sequence '" + seq.source_id.value_or("?") +
                         "' has no label");
    }
    names.insert(*seq.label);
  }
  ds.class_names.assign(names.begin(), names.end());
  ds.sequences.reserve(raw.size());
  for (const auto& seq : raw) {
    const bool already = !seq.frames.empty() &&
                         seq.frames.front().is_simplified() &&
                         map.format_id() == kSimplifiedFormat;
    ds.sequences.push_back(already ? seq : simplify(seq, map));
    ds.sequences.back().validate_for_features();
    const auto it = std::lower_bound(ds.class_names.begin(),
                                     ds.class_names.end(), *seq.label);
    ds.labels.push_back(
        static_cast<std::size_t>(it - ds.class_names.begin()));
  }
  return ds;
}

std::vector<std::vector<std::size_t>> Dataset::by_class() const {
  std::vector<std::vector<std::size_t>> out(class_names.size());
  for (std::size_t i = 0; i < labels.size(); ++i) out[labels[i]].push_back(i);
  return out;
}

std::vector<std::size_t> Batch::labels() const {
  std::vector<std::size_t> out;
  out.reserve(entries.size());
  for (const auto& e : entries) out.push_back(e.label);
  return out;
}

void Batch::check_invariants(std::size_t samples_per_category,
                             std::size_t copies) const {
  std::map<std::size_t, std::map<std::size_t, std::size_t>> counts;
  for (const auto& e : entries) ++counts[e.label][e.source];
  for (const auto& [label, sources] : counts) {
    if (sources.size() != samples_per_category) {
      throw StateError("batch: label " + std::to_string(label) + " has " +
                       std::to_string(sources.size()) + " sources");
    }
    for (const auto& [source, n] : sources) {
      if (n != copies) {
        throw StateError("batch: source " + std::to_string(source) +
                         " appears " + std::to_string(n) + " times");
      }
    }
  }
}

Batch build_batch(const Dataset& dataset, Regime regime,
                  const AugmentConfig& augment, Rng& rng) {
  augment.validate();
  const auto groups = dataset.by_class();
  std::string short_classes;
  for (std::size_t c = 0; c < groups.size(); ++c) {
    if (groups[c].size() < kSamplesPerCategory) {
      if (!short_classes.empty()) short_classes += ", ";
      short_classes += dataset.class_names[c] + " (" +
                       std::to_string(groups[c].size()) + ")";
    }
  }
  if (!short_classes.empty()) {
    throw DatasetError("categories need at least " +
                       std::to_string(kSamplesPerCategory) +
                       " samples: " + short_classes);
  }
  if (groups.empty()) throw DatasetError("empty dataset");

  AugmentConfig cfg = augment;
  if (regime == Regime::kCross) cfg.full_rotation = true;

  // Source selection consumes the caller's stream; each copy then draws from
  // its own derived stream.
  std::vector<std::pair<std::size_t, std::size_t>> picks;  // (label, source)
  for (std::size_t c = 0; c < groups.size(); ++c) {
    std::vector<std::size_t> chosen;
    std::sample(groups[c].begin(), groups[c].end(),
                std::back_inserter(chosen), kSamplesPerCategory, rng);
    for (std::size_t s : chosen) picks.emplace_back(c, s);
  }
  const std::uint64_t batch_seed = rng();

  Batch batch;
  batch.entries.reserve(picks.size() * kCopiesPerSample);
  for (std::size_t p = 0; p < picks.size(); ++p) {
    for (std::size_t copy = 0; copy < kCopiesPerSample; ++copy) {
      Rng sample_rng = derive_rng(batch_seed, p, copy);
      auto aug = augment_for_training(dataset.sequences[picks[p].second], cfg,
                                      sample_rng);
      BatchEntry e;
      e.features = to_matrix(extract_features(aug.sequence));
      e.label = picks[p].first;
      e.source = picks[p].second;
      e.copy = copy;
      e.rotation = aug.rotation;
      batch.entries.push_back(std::move(e));
    }
  }
  return batch;
}

void TrainConfig::validate() const {
  if (!(temperature > 0.0) || !std::isfinite(temperature)) {
    throw UsageError("train: temperature must be > 0");
  }
  if (!(learning_rate >= 0.0) || !std::isfinite(learning_rate)) {
    throw UsageError("train: learning rate must be >= 0");
  }
  if (target_accuracy && (*target_accuracy < 0.0 || *target_accuracy > 1.0)) {
    throw UsageError("train: target accuracy must lie in [0, 1]");
  }
  if (eval_every == 0) throw UsageError("train: eval_every must be >= 1");
  augment.validate();
}

std::string to_log_line(const EpochRecord& record) {
  std::ostringstream out;
  out << "{\"epoch\":" << record.epoch
      << ",\"loss\":" << detail::format_double(record.loss)
      << ",\"wall_seconds\":" << detail::format_double(record.wall_seconds);
  if (record.accuracy) {
    out << ",\"accuracy\":" << detail::format_double(*record.accuracy);
  }
  out << '}';
  return out.str();
}

double linear_accuracy(const ModelParams& model, const Dataset& dataset) {
  if (dataset.size() == 0) throw DatasetError("empty dataset");
  const InferenceModel<double> inference(model);
  const auto& head = inference.linear_head();
  const auto& names = model.config.class_names;
  std::size_t correct = 0;
  const JointMap identity = JointMap::identity();
  for (std::size_t i = 0; i < dataset.size(); ++i) {
    const auto features = model_features(dataset.sequences[i], identity,
                                         model.config.frame_stride);
    const Eigen::VectorXd z = inference.summary(features);
    const Eigen::VectorXd logits = head.weight * z + head.bias;
    Eigen::Index best = 0;
    logits.maxCoeff(&best);
    if (names[static_cast<std::size_t>(best)] ==
        dataset.class_names[dataset.labels[i]]) {
      ++correct;
    }
  }
  return static_cast<double>(correct) / static_cast<double>(dataset.size());
}

FitResult fit(const Dataset& dataset, const TrainConfig& config,
              ModelConfig model_config, const EpochCallback& on_epoch) {
  model_config.class_names = config.regime == Regime::kIntra
                                 ? dataset.class_names
                                 : std::vector<std::string>{};
  return fit(dataset, config, init_model(model_config, config.seed), on_epoch);
}

FitResult fit(const Dataset& dataset, const TrainConfig& config,
              ModelParams initial, const EpochCallback& on_epoch) {
  config.validate();
  initial.config.validate();
  FitResult result;
  result.model = std::move(initial);
  const ModelConfig& mcfg = result.model.config;
  if (config.augment.max_len > mcfg.summarizer.max_frames) {
    throw UsageError("augment max_len exceeds summarizer max_frames");
  }
  if (config.regime == Regime::kIntra &&
      mcfg.class_names != dataset.class_names) {
    throw UsageError(
        "intra regime: model classes do not match the dataset classes");
  }
  if (dataset.class_count() == 0) throw DatasetError("empty dataset");

  const auto start = std::chrono::steady_clock::now();
  result.best = result.model;
  nn::ParamStore& params = result.model.params;
  params.zero_grad();

  nn::Adam adam(nn::AdamConfig{.lr = config.learning_rate});
  Rng batch_rng = derive_rng(config.seed, kBatchStream);
  Rng dropout_rng = derive_rng(config.seed, kDropoutStream);
  Rng* dropout = mcfg.tcn.dropout > 0.0 ? &dropout_rng : nullptr;

  const std::size_t sources_per_batch =
      kSamplesPerCategory * dataset.class_count();
  const std::size_t iterations =
      std::max<std::size_t>(1, (dataset.size() + sources_per_batch - 1) /
                                   sources_per_batch);

  double best_loss = std::numeric_limits<double>::infinity();
  std::size_t since_best = 0;
  std::vector<double> recent;

  for (std::size_t epoch = 1; epoch <= config.epochs; ++epoch) {
    double epoch_sum = 0.0;
    for (std::size_t it = 0; it < iterations; ++it) {
      double loss_value = std::numeric_limits<double>::quiet_NaN();
      try {
        const Batch batch =
            build_batch(dataset, config.regime, config.augment, batch_rng);
        nn::Graph graph(&params);
        std::vector<nn::Var> rows;
        rows.reserve(batch.entries.size());
        for (const auto& e : batch.entries) {
          rows.push_back(
              encode_graph(graph, e.features, mcfg, dropout).summary.summary);
        }
        const nn::Var z = graph.concat_rows(rows);
        const nn::Var loss =
            config.regime == Regime::kIntra
                ? graph.softmax_cross_entropy(classifier_graph(graph, z),
                                              batch.labels())
                : graph.nt_xent(z, batch.labels(), config.temperature);
        loss_value = graph.value(loss)[0];
        graph.backward(loss);
        adam.step(params);
        for (const auto& e : params.entries()) {
          e.value.check_finite(e.name);
        }
      } catch (const NumericalError& err) {
        write_diagnostic(config.diagnostic_path, err.what(), epoch, it, recent,
                         params);
        throw NumericalError(
            "training diverged at epoch " + std::to_string(epoch) +
            ", iteration " + std::to_string(it) + ": " + err.what() +
            (config.diagnostic_path.empty()
                 ? std::string()
                 : " (state dumped to " + config.diagnostic_path.string() +
                       ")"));
      }
      recent.push_back(loss_value);
      if (recent.size() > 16) recent.erase(recent.begin());
      epoch_sum += loss_value;
    }

    EpochRecord record;
    record.epoch = epoch;
    record.loss = epoch_sum / static_cast<double>(iterations);
    const bool evaluate = config.regime == Regime::kIntra &&
                          config.target_accuracy &&
                          (epoch % config.eval_every == 0 ||
                           epoch == config.epochs);
    if (evaluate) record.accuracy = linear_accuracy(result.model, dataset);
    record.wall_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
            .count();
    result.log.push_back(record);
    if (on_epoch) on_epoch(record);

    if (record.loss < best_loss) {
      best_loss = record.loss;
      since_best = 0;
      result.best.params = params;
      if (!config.checkpoint_path.empty()) {
        save_model(config.checkpoint_path, result.best);
      }
    } else {
      ++since_best;
    }
    if (record.accuracy && *record.accuracy >= *config.target_accuracy) {
      result.stopped_early = epoch < config.epochs;
      break;
    }
    if (config.patience > 0 && since_best >= config.patience) {
      result.stopped_early = epoch < config.epochs;
      break;
    }
  }
  if (config.epochs == 0 && !config.checkpoint_path.empty()) {
    save_model(config.checkpoint_path, result.best);
  }
  return result;
}

}  // namespace handmotion
