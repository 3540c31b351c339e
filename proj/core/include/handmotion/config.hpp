#ifndef HANDMOTION_CONFIG_HPP_
#define HANDMOTION_CONFIG_HPP_

#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace handmotion {

// Flat, sectioned key-value text:
//
//   # comment
//   [section]
//   key = value
//
// Keys are addressed as "section.key"; keys before any section header have
// no prefix.
class KeyValueConfig {
 public:
  static KeyValueConfig parse(std::istream& in);
  static KeyValueConfig load(const std::string& path);

  bool has(const std::string& key) const;
  std::optional<std::string> find(const std::string& key) const;

  std::string get_string(const std::string& key,
                         const std::string& fallback) const;
  double get_double(const std::string& key, double fallback) const;
  long long get_int(const std::string& key, long long fallback) const;
  bool get_bool(const std::string& key, bool fallback) const;
  std::vector<double> get_doubles(const std::string& key,
                                  std::vector<double> fallback) const;

  void set(const std::string& key, const std::string& value);
  const std::map<std::string, std::string>& entries() const {
    return entries_;
  }
  // Keys that were never read through a getter; lets callers reject typos.
  std::vector<std::string> unread_keys() const;

  void write(std::ostream& out) const;

 private:
  std::map<std::string, std::string> entries_;
  mutable std::map<std::string, bool> read_;
};

}  // namespace handmotion

#endif  // HANDMOTION_CONFIG_HPP_
