#ifndef HANDMOTION_SKELETON_IO_HPP_
#define HANDMOTION_SKELETON_IO_HPP_

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "handmotion/skeleton.hpp"

namespace handmotion {

// Canonical ".skq" sequence files:
//   skq v1 joints=<J> label=<string>
//   x y z x y z ...        (3*J floats per frame line)
void write_skq(std::ostream& out, const MotionSequence& seq);
void write_skq(const std::filesystem::path& path, const MotionSequence& seq);
MotionSequence read_skq(std::istream& in, std::string source_id = {});
MotionSequence read_skq(const std::filesystem::path& path);

// Format id given to skeletons read with a joint count other than 7.
std::string raw_format_id(std::size_t joint_count);

// Parses "3*J floats" from one text line into a skeleton.
HandSkeleton parse_frame_line(std::string_view line, std::size_t joint_count);

// Describes a dataset's native per-frame text files so they can be
// converted to .skq. Loaded from "key = value" files.
struct DatasetLayout {
  std::string name;
  std::size_t joints = 0;
  std::size_t header_lines = 0;
  std::size_t skip_columns = 0;
  // File name every sequence is stored under (e.g. "skeleton.txt"); empty
  // matches any file with `extension`.
  std::string file_name;
  std::string extension = ".txt";
  // Directory components (relative to the corpus root, 0-based) whose names
  // are joined with '_' to form the label.
  std::vector<std::size_t> label_components;
  // Multiplies every coordinate (e.g. 1000 for metres -> millimetres).
  double unit_scale = 1.0;
};

DatasetLayout parse_dataset_layout(std::istream& in);
DatasetLayout load_dataset_layout(const std::string& path);
DatasetLayout resolve_dataset_layout(const std::string& name_or_path);

// Reads one native sequence file. The label is derived from `relative_path`.
MotionSequence read_native_sequence(const std::filesystem::path& file,
                                    const std::filesystem::path& relative_path,
                                    const DatasetLayout& layout);

// Every .skq file under `dir`, sorted by path.
std::vector<std::filesystem::path> list_skq_files(
    const std::filesystem::path& dir);
std::vector<MotionSequence> read_skq_corpus(const std::filesystem::path& dir);

}  // namespace handmotion

#endif  // HANDMOTION_SKELETON_IO_HPP_
