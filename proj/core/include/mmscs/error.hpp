#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace mmscs {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed input text. Carries a byte offset and, when known, a line/column.
class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t offset, std::size_t line = 0,
             std::size_t column = 0);

  std::size_t offset() const noexcept { return offset_; }
  std::size_t line() const noexcept { return line_; }
  std::size_t column() const noexcept { return column_; }

 private:
  std::size_t offset_;
  std::size_t line_;
  std::size_t column_;
};

/// Invalid configuration or shape contract.
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Numerical failure (NaN/Inf, undefined operation such as a zero-norm cosine).
class NumericError : public Error {
 public:
  using Error::Error;
};

/// Binary/text file format violation (bad magic, version, truncation).
class FormatError : public Error {
 public:
  FormatError(const std::string& what, std::size_t offset);
  std::size_t offset() const noexcept { return offset_; }

 private:
  std::size_t offset_;
};

}  // namespace mmscs
