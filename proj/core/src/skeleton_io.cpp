#include "handmotion/skeleton_io.hpp"

#include <algorithm>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "handmotion/config.hpp"
#include "handmotion/errors.hpp"
#include "text_util.hpp"

namespace handmotion {

namespace fs = std::filesystem;

std::string raw_format_id(std::size_t joint_count) {
  if (joint_count == kSimplifiedJointCount) {
    return std::string(kSimplifiedFormat);
  }
  return "joints" + std::to_string(joint_count);
}

void write_skq(std::ostream& out, const MotionSequence& seq) {
  seq.validate();
  const std::string label = seq.label.value_or("");
  if (label.find_first_of(" \t\r\n") != std::string::npos) {
    throw DataError("label '" + label + "' contains whitespace");
  }
  out << "skq v1 joints=" << seq.joint_count() << " label=" << label << '\n';
  for (const auto& frame : seq.frames) {
    bool first = true;
    for (const auto& j : frame.joints()) {
      for (int a = 0; a < 3; ++a) {
        if (!first) out << ' ';
        out << detail::format_double(j[a]);
        first = false;
      }
    }
    out << '\n';
  }
}

void write_skq(const fs::path& path, const MotionSequence& seq) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path);
  if (!out) throw DataError("cannot write " + path.string());
  write_skq(out, seq);
  if (!out) throw DataError("write failed for " + path.string());
}

HandSkeleton parse_frame_line(std::string_view line, std::size_t joint_count) {
  std::vector<double> values;
  if (!detail::parse_doubles(line, values)) {
    throw ParseError("malformed number in frame line");
  }
  if (values.size() != 3 * joint_count) {
    throw ParseError(
        shape_message("values per frame line", 3 * joint_count, values.size()));
  }
  std::vector<Point3> joints(joint_count);
  for (std::size_t j = 0; j < joint_count; ++j) {
    joints[j] = Point3(values[3 * j], values[3 * j + 1], values[3 * j + 2]);
  }
  return HandSkeleton(std::move(joints), raw_format_id(joint_count));
}

MotionSequence read_skq(std::istream& in, std::string source_id) {
  std::string header;
  if (!std::getline(in, header)) throw ParseError("empty .skq stream");
  std::istringstream fields(header);
  std::string magic, version, joints_field, label_field;
  fields >> magic >> version >> joints_field;
  if (magic != "skq" || version != "v1" || !joints_field.starts_with("joints=")) {
    throw ParseError("bad .skq header: '" + header + "'");
  }
  std::size_t joint_count = 0;
  try {
    joint_count = std::stoul(joints_field.substr(7));
  } catch (const std::exception&) {
    throw ParseError("bad joint count in .skq header: '" + header + "'");
  }
  if (joint_count == 0) throw ParseError(".skq header declares zero joints");
  MotionSequence seq;
  if (fields >> label_field) {
    if (!label_field.starts_with("label=")) {
      throw ParseError("bad .skq header: '" + header + "'");
    }
    auto label = label_field.substr(6);
    if (!label.empty()) seq.label = std::move(label);
  }
  if (!source_id.empty()) seq.source_id = std::move(source_id);
  std::string line;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (detail::trim(line).empty()) continue;
    try {
      seq.frames.push_back(parse_frame_line(line, joint_count));
    } catch (const DataError& e) {
      throw ParseError(".skq line " + std::to_string(line_no) + ": " +
                       e.what());
    }
  }
  return seq;
}

MotionSequence read_skq(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open " + path.string());
  try {
    return read_skq(in, path.stem().string());
  } catch (const ParseError& e) {
    throw ParseError(path.string() + ": " + e.what());
  }
}

DatasetLayout parse_dataset_layout(std::istream& in) {
  const auto cfg = KeyValueConfig::parse(in);
  DatasetLayout layout;
  layout.name = cfg.get_string("name", "custom");
  const auto joints = cfg.get_int("joints", 0);
  if (joints <= 0) throw ParseError("dataset layout: 'joints' must be > 0");
  layout.joints = static_cast<std::size_t>(joints);
  const auto header = cfg.get_int("header_lines", 0);
  const auto skip = cfg.get_int("skip_columns", 0);
  if (header < 0 || skip < 0) {
    throw ParseError("dataset layout: negative header_lines/skip_columns");
  }
  layout.header_lines = static_cast<std::size_t>(header);
  layout.skip_columns = static_cast<std::size_t>(skip);
  layout.file_name = cfg.get_string("file_name", "");
  layout.extension = cfg.get_string("extension", ".txt");
  layout.unit_scale = cfg.get_double("unit_scale", 1.0);
  for (double c : cfg.get_doubles("label_components", {0})) {
    if (c < 0) throw ParseError("dataset layout: negative label component");
    layout.label_components.push_back(static_cast<std::size_t>(c));
  }
  if (auto unread = cfg.unread_keys(); !unread.empty()) {
    throw ParseError("dataset layout: unknown key '" + unread.front() + "'");
  }
  return layout;
}

DatasetLayout load_dataset_layout(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open dataset layout " + path);
  return parse_dataset_layout(in);
}

DatasetLayout resolve_dataset_layout(const std::string& name_or_path) {
  if (name_or_path.find('/') != std::string::npos ||
      name_or_path.ends_with(".layout")) {
    return load_dataset_layout(name_or_path);
  }
  const auto path = fs::path(default_data_dir()) / "layouts" /
                    (name_or_path + ".layout");
  return load_dataset_layout(path.string());
}

MotionSequence read_native_sequence(const fs::path& file,
                                    const fs::path& relative_path,
                                    const DatasetLayout& layout) {
  std::ifstream in(file);
  if (!in) throw DataError("cannot open " + file.string());
  MotionSequence seq;
  std::vector<std::string> parts;
  for (const auto& p : relative_path.parent_path()) parts.push_back(p.string());
  std::string label;
  for (std::size_t c : layout.label_components) {
    if (c >= parts.size()) {
      throw DataError(file.string() + ": label component " +
                      std::to_string(c) + " missing from path");
    }
    if (!label.empty()) label += '_';
    label += parts[c];
  }
  if (!label.empty()) seq.label = label;
  seq.source_id = relative_path.generic_string();

  std::string line;
  std::size_t line_no = 0;
  std::vector<double> values;
  while (std::getline(in, line)) {
    ++line_no;
    if (line_no <= layout.header_lines) continue;
    if (detail::trim(line).empty()) continue;
    if (!detail::parse_doubles(line, values)) {
      throw ParseError(file.string() + ":" + std::to_string(line_no) +
                       ": malformed number");
    }
    const std::size_t want = layout.skip_columns + 3 * layout.joints;
    if (values.size() != want) {
      throw ParseError(file.string() + ":" + std::to_string(line_no) + ": " +
                       shape_message("columns", want, values.size()));
    }
    std::vector<Point3> joints(layout.joints);
    for (std::size_t j = 0; j < layout.joints; ++j) {
      const std::size_t base = layout.skip_columns + 3 * j;
      joints[j] = Point3(values[base], values[base + 1], values[base + 2]) *
                  layout.unit_scale;
    }
    seq.frames.emplace_back(std::move(joints), raw_format_id(layout.joints));
  }
  return seq;
}

std::vector<fs::path> list_skq_files(const fs::path& dir) {
  if (!fs::is_directory(dir)) {
    throw DataError("not a directory: " + dir.string());
  }
  std::vector<fs::path> files;
  for (const auto& entry : fs::recursive_directory_iterator(dir)) {
    if (entry.is_regular_file() && entry.path().extension() == ".skq") {
      files.push_back(entry.path());
    }
  }
  std::sort(files.begin(), files.end());
  return files;
}

std::vector<MotionSequence> read_skq_corpus(const fs::path& dir) {
  std::vector<MotionSequence> out;
  for (const auto& f : list_skq_files(dir)) out.push_back(read_skq(f));
  return out;
}

}  // namespace handmotion
