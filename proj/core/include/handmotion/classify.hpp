#ifndef HANDMOTION_CLASSIFY_HPP_
#define HANDMOTION_CLASSIFY_HPP_

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "handmotion/model.hpp"
#include "handmotion/skeleton.hpp"

namespace handmotion {

// Probabilities over a fixed, sorted label list.
struct ClassProbabilities {
  std::vector<std::string> labels;
  Eigen::VectorXd p;

  double of(const std::string& label) const;
  // Index of the largest probability (first on ties).
  std::size_t argmax() const;
  const std::string& top_label() const { return labels.at(argmax()); }
  double top_probability() const { return p[argmax()]; }
};

// Labeled descriptors for nearest-neighbour classification. Immutable.
class ReferenceSet {
 public:
  ReferenceSet() = default;
  // Throws DataError on an empty set, a non-finite or zero descriptor, or
  // mixed dimensions.
  ReferenceSet(std::vector<Eigen::VectorXd> descriptors,
               std::vector<std::string> labels,
               std::vector<bool> augmented = {});

  std::size_t size() const { return labels_.size(); }
  std::size_t dim() const { return static_cast<std::size_t>(unit_.cols()); }
  const std::vector<std::string>& class_names() const { return classes_; }
  const std::string& label(std::size_t i) const { return labels_.at(i); }
  std::size_t label_index(std::size_t i) const { return label_index_.at(i); }
  bool augmented(std::size_t i) const { return augmented_.at(i); }
  const Eigen::VectorXd& descriptor(std::size_t i) const {
    return raw_.at(i);
  }
  // Row-normalized descriptors [size, dim].
  const Eigen::MatrixXd& unit_rows() const { return unit_; }

  // At most `cap` entries chosen uniformly without replacement; original
  // order is kept. Returns a copy when size() <= cap.
  ReferenceSet subsample(std::size_t cap, std::uint64_t seed) const;

 private:
  std::vector<Eigen::VectorXd> raw_;
  std::vector<std::string> labels_;
  std::vector<bool> augmented_;
  std::vector<std::string> classes_;
  std::vector<std::size_t> label_index_;
  Eigen::MatrixXd unit_;
};

inline constexpr std::size_t kReferenceCap = 8000;
inline constexpr double kExactMatchDistance = 1e-12;

// softmax(W z + b) over `class_names`.
ClassProbabilities linear_classify(const Eigen::VectorXd& z,
                                   const LinearHead& head,
                                   const std::vector<std::string>& class_names);

// Inverse-distance weighted vote of the k nearest references under cosine
// distance 1 - cos(z, r). References closer than 1e-12 take all the weight,
// split evenly among their distinct labels.
ClassProbabilities knn_classify(const Eigen::VectorXd& z,
                                const ReferenceSet& refs, std::size_t k);

struct LabeledDescriptor {
  Eigen::VectorXd descriptor;
  std::string label;
};

struct KSweepRow {
  std::size_t k = 0;
  double accuracy = 0.0;
};

struct KSweepResult {
  std::size_t best_k = 0;
  double best_accuracy = 0.0;
  std::vector<KSweepRow> table;
};

inline const std::vector<std::size_t> kDefaultKs = {1, 3, 5, 7, 9, 11};

double knn_accuracy(const std::vector<LabeledDescriptor>& targets,
                    const ReferenceSet& refs, std::size_t k);
// Candidates larger than the reference set are skipped. Ties go to the
// smallest k.
KSweepResult sweep_k(const std::vector<LabeledDescriptor>& targets,
                     const ReferenceSet& refs,
                     const std::vector<std::size_t>& candidate_ks = kDefaultKs);

// Arithmetic mean of the per-frame vectors, renormalized.
ClassProbabilities average_probabilities(
    const std::vector<ClassProbabilities>& frames);

// Online per-frame KNN over the encoder's per-frame descriptors. Raw frames
// are simplified and thinned to every `frame_stride`-th frame (offset 0);
// frames dropped by the thinning repeat the latest prediction.
class StreamingClassifier {
 public:
  // `frame_stride` 0 means the model's configured stride.
  StreamingClassifier(const InferenceModel<float>& model,
                      const ReferenceSet& refs, std::size_t k,
                      JointMap joint_map, std::size_t frame_stride = 0);

  struct Step {
    std::size_t t = 0;       // raw frame index
    bool fresh = false;      // this frame went through the encoder
    ClassProbabilities probabilities;
  };

  Step push(const HandSkeleton& raw_frame);
  // Mean over the fresh per-frame predictions so far.
  ClassProbabilities video() const;
  const std::vector<ClassProbabilities>& frame_probabilities() const {
    return fresh_;
  }
  void reset();

 private:
  const InferenceModel<float>* model_;
  const ReferenceSet* refs_;
  std::size_t k_;
  JointMap map_;
  std::size_t stride_;
  TcnEncoder<float>::StreamState state_;
  std::optional<HandSkeleton> previous_;
  std::size_t raw_count_ = 0;
  AlignedVector<float> input_, output_;
  std::vector<ClassProbabilities> fresh_;
};

struct StreamResult {
  std::vector<ClassProbabilities> frames;  // one per model frame
  ClassProbabilities video;
};

// Whole-sequence counterpart of StreamingClassifier. Like
// prepare_for_model, sequences too short to thin are used at full rate.
StreamResult classify_stream(const MotionSequence& raw,
                             const InferenceModel<float>& model,
                             const ReferenceSet& refs, std::size_t k,
                             const JointMap& joint_map);

// Descriptor files: "dsc v1 dim=D" then "label<TAB>D floats" per line.
void write_dsc(std::ostream& out, const std::vector<LabeledDescriptor>& rows);
void write_dsc(const std::filesystem::path& path,
               const std::vector<LabeledDescriptor>& rows);
std::vector<LabeledDescriptor> read_dsc(std::istream& in);
std::vector<LabeledDescriptor> read_dsc(const std::filesystem::path& path);
ReferenceSet to_reference_set(const std::vector<LabeledDescriptor>& rows);

}  // namespace handmotion

#endif  // HANDMOTION_CLASSIFY_HPP_
