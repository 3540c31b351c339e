#include "handmotion/config.hpp"

#include <fstream>
#include <sstream>

#include "handmotion/errors.hpp"
#include "text_util.hpp"

namespace handmotion {

KeyValueConfig KeyValueConfig::parse(std::istream& in) {
  KeyValueConfig cfg;
  std::string section;
  std::string raw;
  int line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    std::string_view line = raw;
    if (auto hash = line.find('#'); hash != std::string_view::npos) {
      line = line.substr(0, hash);
    }
    line = detail::trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') {
        throw ParseError("config line " + std::to_string(line_no) +
                         ": unterminated section header");
      }
      section = std::string(detail::trim(line.substr(1, line.size() - 2)));
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      throw ParseError("config line " + std::to_string(line_no) +
                       ": expected 'key = value'");
    }
    const auto key = detail::trim(line.substr(0, eq));
    const auto value = detail::trim(line.substr(eq + 1));
    if (key.empty()) {
      throw ParseError("config line " + std::to_string(line_no) +
                       ": empty key");
    }
    const std::string full =
        section.empty() ? std::string(key) : section + "." + std::string(key);
    cfg.entries_[full] = std::string(value);
  }
  return cfg;
}

KeyValueConfig KeyValueConfig::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open config " + path);
  return parse(in);
}

bool KeyValueConfig::has(const std::string& key) const {
  return entries_.count(key) != 0;
}

std::optional<std::string> KeyValueConfig::find(const std::string& key) const {
  auto it = entries_.find(key);
  if (it == entries_.end()) return std::nullopt;
  read_[key] = true;
  return it->second;
}

std::string KeyValueConfig::get_string(const std::string& key,
                                       const std::string& fallback) const {
  return find(key).value_or(fallback);
}

double KeyValueConfig::get_double(const std::string& key,
                                  double fallback) const {
  auto v = find(key);
  if (!v) return fallback;
  std::vector<double> parsed;
  if (!detail::parse_doubles(*v, parsed) || parsed.size() != 1) {
    throw ParseError("config key " + key + ": expected a number, got '" + *v +
                     "'");
  }
  return parsed.front();
}

long long KeyValueConfig::get_int(const std::string& key,
                                  long long fallback) const {
  auto v = find(key);
  if (!v) return fallback;
  try {
    std::size_t used = 0;
    long long out = std::stoll(*v, &used);
    if (used != v->size()) throw std::invalid_argument(*v);
    return out;
  } catch (const std::exception&) {
    throw ParseError("config key " + key + ": expected an integer, got '" +
                     *v + "'");
  }
}

bool KeyValueConfig::get_bool(const std::string& key, bool fallback) const {
  auto v = find(key);
  if (!v) return fallback;
  if (*v == "true" || *v == "1" || *v == "yes" || *v == "on") return true;
  if (*v == "false" || *v == "0" || *v == "no" || *v == "off") return false;
  throw ParseError("config key " + key + ": expected a boolean, got '" + *v +
                   "'");
}

std::vector<double> KeyValueConfig::get_doubles(
    const std::string& key, std::vector<double> fallback) const {
  auto v = find(key);
  if (!v) return fallback;
  std::vector<double> parsed;
  if (!detail::parse_doubles(*v, parsed)) {
    throw ParseError("config key " + key + ": expected numbers, got '" + *v +
                     "'");
  }
  return parsed;
}

void KeyValueConfig::set(const std::string& key, const std::string& value) {
  entries_[key] = value;
}

std::vector<std::string> KeyValueConfig::unread_keys() const {
  std::vector<std::string> out;
  for (const auto& [k, v] : entries_) {
    if (!read_.count(k)) out.push_back(k);
  }
  return out;
}

void KeyValueConfig::write(std::ostream& out) const {
  for (const auto& [k, v] : entries_) {
    if (k.find('.') == std::string::npos) out << k << " = " << v << '\n';
  }
  std::string section;
  for (const auto& [k, v] : entries_) {
    const auto dot = k.find('.');
    if (dot == std::string::npos) continue;
    const std::string sec = k.substr(0, dot);
    if (sec != section) {
      out << "\n[" << sec << "]\n";
      section = sec;
    }
    out << k.substr(dot + 1) << " = " << v << '\n';
  }
}

}  // namespace handmotion
