#include "mmscs/error.hpp"

namespace mmscs {

namespace {
std::string with_position(const std::string& what, std::size_t offset,
                          std::size_t line, std::size_t column) {
  std::string out = what + " (offset " + std::to_string(offset);
  if (line > 0) {
    out += ", line " + std::to_string(line) + ", column " + std::to_string(column);
  }
  return out + ")";
}
}  // namespace

ParseError::ParseError(const std::string& what, std::size_t offset,
                       std::size_t line, std::size_t column)
    : Error(with_position(what, offset, line, column)),
      offset_(offset),
      line_(line),
      column_(column) {}

FormatError::FormatError(const std::string& what, std::size_t offset)
    : Error(what + " (at byte " + std::to_string(offset) + ")"), offset_(offset) {}

}  // namespace mmscs
