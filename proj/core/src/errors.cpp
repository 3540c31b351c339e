#include "handmotion/errors.hpp"

namespace handmotion {

std::string shape_message(const std::string& what, std::size_t expected,
                          std::size_t actual) {
  return what + ": expected " + std::to_string(expected) + ", got " +
         std::to_string(actual);
}

}  // namespace handmotion
