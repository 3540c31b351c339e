#include "handmotion/classify.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <numeric>
#include <ostream>
#include <random>
#include <set>

#include "handmotion/augment.hpp"
#include "handmotion/errors.hpp"
#include "handmotion/features.hpp"
#include "text_util.hpp"

namespace handmotion {

double ClassProbabilities::of(const std::string& label) const {
  const auto it = std::find(labels.begin(), labels.end(), label);
  if (it == labels.end()) return 0.0;
  return p[it - labels.begin()];
}

std::size_t ClassProbabilities::argmax() const {
  if (p.size() == 0) throw StateError("empty probability vector");
  Eigen::Index best = 0;
  for (Eigen::Index i = 1; i < p.size(); ++i) {
    if (p[i] > p[best]) best = i;
  }
  return static_cast<std::size_t>(best);
}

ReferenceSet::ReferenceSet(std::vector<Eigen::VectorXd> descriptors,
                           std::vector<std::string> labels,
                           std::vector<bool> augmented)
    : raw_(std::move(descriptors)),
      labels_(std::move(labels)),
      augmented_(std::move(augmented)) {
  if (raw_.empty()) throw DatasetError("reference set is empty");
  if (labels_.size() != raw_.size()) {
    throw DimensionError(shape_message("reference labels", raw_.size(),
                                       labels_.size()));
  }
  if (augmented_.empty()) augmented_.assign(raw_.size(), false);
  if (augmented_.size() != raw_.size()) {
    throw DimensionError(shape_message("reference provenance flags",
                                       raw_.size(), augmented_.size()));
  }
  const auto dim = raw_.front().size();
  unit_.resize(static_cast<Eigen::Index>(raw_.size()), dim);
  std::set<std::string> names;
  for (std::size_t i = 0; i < raw_.size(); ++i) {
    const auto& d = raw_[i];
    if (d.size() != dim) {
      throw DatasetError(shape_message("reference descriptor",
                                       static_cast<std::size_t>(dim),
                                       static_cast<std::size_t>(d.size())));
    }
    if (!d.allFinite()) throw DatasetError("non-finite reference descriptor");
    const double n = d.norm();
    if (!(n > 0.0)) throw DatasetError("zero reference descriptor");
    if (labels_[i].empty()) throw DatasetError("unlabeled reference");
    unit_.row(static_cast<Eigen::Index>(i)) = d.transpose() / n;
    names.insert(labels_[i]);
  }
  classes_.assign(names.begin(), names.end());
  label_index_.reserve(labels_.size());
  for (const auto& l : labels_) {
    label_index_.push_back(static_cast<std::size_t>(
        std::lower_bound(classes_.begin(), classes_.end(), l) -
        classes_.begin()));
  }
}

ReferenceSet ReferenceSet::subsample(std::size_t cap,
                                     std::uint64_t seed) const {
  if (cap == 0) throw UsageError("subsample cap must be >= 1");
  if (size() <= cap) return *this;
  std::vector<std::size_t> all(size());
  std::iota(all.begin(), all.end(), 0);
  std::vector<std::size_t> keep;
  std::mt19937_64 rng(seed);
  std::sample(all.begin(), all.end(), std::back_inserter(keep), cap, rng);
  std::vector<Eigen::VectorXd> d;
  std::vector<std::string> l;
  std::vector<bool> a;
  for (std::size_t i : keep) {
    d.push_back(raw_[i]);
    l.push_back(labels_[i]);
    a.push_back(augmented_[i]);
  }
  return ReferenceSet(std::move(d), std::move(l), std::move(a));
}

ClassProbabilities linear_classify(
    const Eigen::VectorXd& z, const LinearHead& head,
    const std::vector<std::string>& class_names) {
  if (head.weight.cols() != z.size()) {
    throw DimensionError(shape_message("descriptor",
                                       static_cast<std::size_t>(head.weight.cols()),
                                       static_cast<std::size_t>(z.size())));
  }
  if (head.weight.rows() != head.bias.size() ||
      static_cast<std::size_t>(head.bias.size()) != class_names.size()) {
    throw DimensionError("linear head does not match the class list");
  }
  const Eigen::VectorXd logits = head.weight * z + head.bias;
  const Eigen::VectorXd e = (logits.array() - logits.maxCoeff()).exp();
  ClassProbabilities out;
  out.labels = class_names;
  out.p = e / e.sum();
  return out;
}

ClassProbabilities knn_classify(const Eigen::VectorXd& z,
                                const ReferenceSet& refs, std::size_t k) {
  if (refs.size() == 0) throw UsageError("knn: empty reference set");
  if (k < 1 || k > refs.size()) {
    throw UsageError("knn: k=" + std::to_string(k) + " outside [1, " +
                     std::to_string(refs.size()) + "]");
  }
  if (static_cast<std::size_t>(z.size()) != refs.dim()) {
    throw DimensionError(shape_message("query descriptor", refs.dim(),
                                       static_cast<std::size_t>(z.size())));
  }
  const double norm = z.norm();
  if (!std::isfinite(norm)) throw NumericalError("knn: non-finite query");
  if (!(norm > 0.0)) throw NumericalError("knn: zero query descriptor");

  const Eigen::VectorXd dist =
      (1.0 - (refs.unit_rows() * (z / norm)).array()).matrix();

  ClassProbabilities out;
  out.labels = refs.class_names();
  out.p = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(out.labels.size()));

  std::vector<bool> exact(out.labels.size(), false);
  bool any_exact = false;
  for (std::size_t i = 0; i < refs.size(); ++i) {
    if (dist[static_cast<Eigen::Index>(i)] < kExactMatchDistance) {
      exact[refs.label_index(i)] = true;
      any_exact = true;
    }
  }
  if (any_exact) {
    const auto n = std::count(exact.begin(), exact.end(), true);
    for (std::size_t c = 0; c < exact.size(); ++c) {
      if (exact[c]) out.p[static_cast<Eigen::Index>(c)] = 1.0 / n;
    }
    return out;
  }

  std::vector<std::size_t> order(refs.size());
  std::iota(order.begin(), order.end(), 0);
  const auto nth = order.begin() + static_cast<std::ptrdiff_t>(k);
  std::partial_sort(order.begin(), nth, order.end(),
                    [&](std::size_t a, std::size_t b) {
                      const double da = dist[static_cast<Eigen::Index>(a)];
                      const double db = dist[static_cast<Eigen::Index>(b)];
                      return da != db ? da < db : a < b;
                    });
  for (auto it = order.begin(); it != nth; ++it) {
    out.p[static_cast<Eigen::Index>(refs.label_index(*it))] +=
        1.0 / dist[static_cast<Eigen::Index>(*it)];
  }
  out.p /= out.p.sum();
  return out;
}

double knn_accuracy(const std::vector<LabeledDescriptor>& targets,
                    const ReferenceSet& refs, std::size_t k) {
  if (targets.empty()) throw UsageError("knn: no targets");
  std::size_t correct = 0;
  for (const auto& t : targets) {
    if (knn_classify(t.descriptor, refs, k).top_label() == t.label) ++correct;
  }
  return static_cast<double>(correct) / static_cast<double>(targets.size());
}

KSweepResult sweep_k(const std::vector<LabeledDescriptor>& targets,
                     const ReferenceSet& refs,
                     const std::vector<std::size_t>& candidate_ks) {
  std::vector<std::size_t> ks = candidate_ks;
  std::sort(ks.begin(), ks.end());
  ks.erase(std::unique(ks.begin(), ks.end()), ks.end());
  KSweepResult result;
  for (std::size_t k : ks) {
    if (k < 1 || k > refs.size()) continue;
    const double acc = knn_accuracy(targets, refs, k);
    result.table.push_back({k, acc});
    if (result.best_k == 0 || acc > result.best_accuracy) {
      result.best_k = k;
      result.best_accuracy = acc;
    }
  }
  if (result.table.empty()) {
    throw UsageError("sweep_k: no candidate k fits " +
                     std::to_string(refs.size()) + " references");
  }
  return result;
}

ClassProbabilities average_probabilities(
    const std::vector<ClassProbabilities>& frames) {
  if (frames.empty()) throw UsageError("no per-frame probabilities");
  ClassProbabilities out;
  out.labels = frames.front().labels;
  out.p = Eigen::VectorXd::Zero(frames.front().p.size());
  for (const auto& f : frames) {
    if (f.labels != out.labels) {
      throw DimensionError("per-frame probabilities over different labels");
    }
    out.p += f.p;
  }
  out.p /= static_cast<double>(frames.size());
  out.p /= out.p.sum();
  return out;
}

StreamingClassifier::StreamingClassifier(const InferenceModel<float>& model,
                                         const ReferenceSet& refs,
                                         std::size_t k, JointMap joint_map,
                                         std::size_t frame_stride)
    : model_(&model),
      refs_(&refs),
      k_(k),
      map_(std::move(joint_map)),
      stride_(frame_stride == 0 ? model.config().frame_stride : frame_stride),
      state_(model.encoder().make_state()),
      input_(kFeatureDim),
      output_(model.encoder().output_dim()) {
  if (refs.dim() != model.encoder().output_dim()) {
    throw DimensionError(shape_message("reference descriptors",
                                       model.encoder().output_dim(),
                                       refs.dim()));
  }
  if (k < 1 || k > refs.size()) {
    throw UsageError("knn: k=" + std::to_string(k) + " outside [1, " +
                     std::to_string(refs.size()) + "]");
  }
  if (stride_ == 0) stride_ = 1;
}

StreamingClassifier::Step StreamingClassifier::push(
    const HandSkeleton& raw_frame) {
  Step step;
  step.t = raw_count_++;
  if (step.t % stride_ != 0) {
    step.probabilities = fresh_.back();
    return step;
  }
  HandSkeleton simplified =
      raw_frame.is_simplified() && map_.format_id() == kSimplifiedFormat
          ? raw_frame
          : simplify(raw_frame, map_);
  const PoseFeatureFrame f =
      frame_features(previous_ ? &*previous_ : nullptr, simplified);
  previous_ = std::move(simplified);
  for (std::size_t i = 0; i < kFeatureDim; ++i) {
    input_[i] = static_cast<float>(f[i]);
  }
  model_->encoder().stream_step(state_, input_, output_);
  Eigen::VectorXd z(static_cast<Eigen::Index>(output_.size()));
  for (std::size_t i = 0; i < output_.size(); ++i) {
    z[static_cast<Eigen::Index>(i)] = output_[i];
  }
  step.fresh = true;
  step.probabilities = knn_classify(z, *refs_, k_);
  fresh_.push_back(step.probabilities);
  return step;
}

ClassProbabilities StreamingClassifier::video() const {
  return average_probabilities(fresh_);
}

void StreamingClassifier::reset() {
  state_.reset();
  previous_.reset();
  raw_count_ = 0;
  fresh_.clear();
}

StreamResult classify_stream(const MotionSequence& raw,
                             const InferenceModel<float>& model,
                             const ReferenceSet& refs, std::size_t k,
                             const JointMap& joint_map) {
  raw.validate_for_features();
  std::size_t stride = model.config().frame_stride;
  if (stride > 1 && raw.frames.size() < stride + 1) stride = 1;
  StreamingClassifier sc(model, refs, k, joint_map, stride);
  for (const auto& frame : raw.frames) sc.push(frame);
  StreamResult out;
  out.frames = sc.frame_probabilities();
  out.video = sc.video();
  return out;
}

void write_dsc(std::ostream& out, const std::vector<LabeledDescriptor>& rows) {
  const std::size_t dim =
      rows.empty() ? 256 : static_cast<std::size_t>(rows.front().descriptor.size());
  out << "dsc v1 dim=" << dim << '\n';
  for (const auto& r : rows) {
    if (static_cast<std::size_t>(r.descriptor.size()) != dim) {
      throw DimensionError(shape_message("descriptor", dim,
                                         static_cast<std::size_t>(r.descriptor.size())));
    }
    if (r.label.empty() ||
        r.label.find_first_of("\t\n\r") != std::string::npos) {
      throw UsageError("descriptor label must be non-empty without tabs");
    }
    out << r.label << '\t';
    for (Eigen::Index i = 0; i < r.descriptor.size(); ++i) {
      if (i) out << ' ';
      out << detail::format_double(r.descriptor[i]);
    }
    out << '\n';
  }
}

void write_dsc(const std::filesystem::path& path,
               const std::vector<LabeledDescriptor>& rows) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write " + path.string());
  write_dsc(out, rows);
}

std::vector<LabeledDescriptor> read_dsc(std::istream& in) {
  std::string header;
  if (!std::getline(in, header)) throw ParseError("empty .dsc input");
  header = std::string(detail::trim(header));
  const std::string prefix = "dsc v1 dim=";
  if (header.rfind(prefix, 0) != 0) {
    throw ParseError("bad .dsc header: '" + header + "'");
  }
  std::size_t dim = 0;
  try {
    dim = std::stoul(header.substr(prefix.size()));
  } catch (const std::exception&) {
    throw ParseError("bad .dsc dimension: '" + header + "'");
  }
  if (dim == 0) throw ParseError(".dsc dimension must be positive");
  std::vector<LabeledDescriptor> rows;
  std::vector<double> values;
  std::string line;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (detail::trim(line).empty()) continue;
    const auto tab = line.find('\t');
    if (tab == std::string::npos || tab == 0) {
      throw ParseError(".dsc line " + std::to_string(line_no) +
                       ": expected label<TAB>values");
    }
    if (!detail::parse_doubles(std::string_view(line).substr(tab + 1),
                               values) ||
        values.size() != dim) {
      throw ParseError(".dsc line " + std::to_string(line_no) + ": expected " +
                       std::to_string(dim) + " floats");
    }
    LabeledDescriptor r;
    r.label = line.substr(0, tab);
    r.descriptor = Eigen::Map<const Eigen::VectorXd>(
        values.data(), static_cast<Eigen::Index>(values.size()));
    rows.push_back(std::move(r));
  }
  return rows;
}

std::vector<LabeledDescriptor> read_dsc(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open " + path.string());
  return read_dsc(in);
}

ReferenceSet to_reference_set(const std::vector<LabeledDescriptor>& rows) {
  std::vector<Eigen::VectorXd> d;
  std::vector<std::string> l;
  d.reserve(rows.size());
  l.reserve(rows.size());
  for (const auto& r : rows) {
    d.push_back(r.descriptor);
    l.push_back(r.label);
  }
  return ReferenceSet(std::move(d), std::move(l));
}

}  // namespace handmotion
