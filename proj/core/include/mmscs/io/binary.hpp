#pragma once

#include <algorithm>
#include <array>
#include <bit>
#include <cstdint>
#include <cstring>
#include <istream>
#include <ostream>
#include <string>

#include "mmscs/error.hpp"

namespace mmscs::io {

static_assert(std::endian::native == std::endian::little || std::endian::native == std::endian::big);

template <typename T>
T to_little(T v) {
  if constexpr (std::endian::native == std::endian::big) {
    auto bytes = std::bit_cast<std::array<unsigned char, sizeof(T)>>(v);
    std::reverse(bytes.begin(), bytes.end());
    return std::bit_cast<T>(bytes);
  }
  return v;
}

/// Little-endian writer over an ostream.
class Writer {
 public:
  explicit Writer(std::ostream& out) : out_(out) {}

  void bytes(const void* p, std::size_t n) { out_.write(static_cast<const char*>(p), static_cast<std::streamsize>(n)); }
  template <typename T>
  void put(T v) {
    v = to_little(v);
    bytes(&v, sizeof v);
  }
  void f64(double v) { put(std::bit_cast<std::uint64_t>(v)); }
  void str32(const std::string& s) {
    put(static_cast<std::uint32_t>(s.size()));
    bytes(s.data(), s.size());
  }

 private:
  std::ostream& out_;
};

/// Little-endian reader that reports the byte offset of a short read.
class Reader {
 public:
  explicit Reader(std::istream& in, const char* what) : in_(in), what_(what) {}

  void bytes(void* p, std::size_t n) {
    in_.read(static_cast<char*>(p), static_cast<std::streamsize>(n));
    const auto got = static_cast<std::size_t>(in_.gcount());
    if (got != n)
      throw FormatError(std::string(what_) + " truncated at byte " + std::to_string(offset_ + got),
                        offset_ + got);
    offset_ += n;
  }
  template <typename T>
  T get() {
    T v;
    bytes(&v, sizeof v);
    return to_little(v);
  }
  double f64() { return std::bit_cast<double>(get<std::uint64_t>()); }
  std::string str32(std::size_t limit = std::size_t{1} << 30) {
    const auto n = get<std::uint32_t>();
    if (n > limit) throw FormatError(std::string(what_) + ": implausible string length", offset_);
    std::string s(n, '\0');
    bytes(s.data(), n);
    return s;
  }
  std::size_t offset() const { return offset_; }
  /// True when the stream has no more bytes.
  bool at_end() { return in_.peek() == std::char_traits<char>::eof(); }

 private:
  std::istream& in_;
  const char* what_;
  std::size_t offset_ = 0;
};

}  // namespace mmscs::io
