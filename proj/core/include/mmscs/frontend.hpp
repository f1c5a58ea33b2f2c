#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace mmscs {

enum class UnitKind { Function, Modifier, Fallback };

std::string_view to_string(UnitKind kind);
UnitKind unit_kind_from_string(std::string_view s);

struct LineSpan {
  std::size_t start = 0;
  std::size_t end = 0;
  bool operator==(const LineSpan&) const = default;
};

/// One function, modifier or fallback definition extracted from a Solidity file.
struct FunctionUnit {
  std::string id;
  UnitKind kind = UnitKind::Function;
  std::string name;  // empty for fallback
  std::string source;
  std::optional<std::string> docstring;
  std::string path;
  LineSpan span;
  std::string contract;  // enclosing contract, empty for free functions
  /// Declared types of contract state variables referenced by this unit.
  std::map<std::string, std::string> state_vars;
  /// Byte range of `source` inside the original file; [begin, end).
  std::size_t byte_begin = 0;
  std::size_t byte_end = 0;

  bool operator==(const FunctionUnit&) const = default;
};

/// Contract-level facts gathered alongside the units.
struct ContractInfo {
  std::string name;
  std::map<std::string, std::string> state_vars;  // name -> normalized type
  bool has_fallback = false;
};

struct SourceFile {
  std::vector<FunctionUnit> units;
  std::vector<ContractInfo> contracts;
};

/// Splits a Solidity file into function-level units with their docstrings.
/// Throws ParseError naming the byte offset of an unbalanced brace.
SourceFile parse_source(std::string_view source, const std::string& path);

std::vector<FunctionUnit> extract_functions(std::string_view source, const std::string& path);

/// Length caps for the three textual modalities.
struct Caps {
  std::size_t tokens = 100;
  std::size_t name = 6;
  std::size_t api = 20;
  bool operator==(const Caps&) const = default;
};

/// Code tokens (T), function-name words (F), API call words (A). Sequences are
/// stored unpadded; size() is the true length.
struct TokenBundle {
  std::vector<std::string> tokens;
  std::vector<std::string> name;
  std::vector<std::string> api;

  bool empty() const { return tokens.empty() && name.empty() && api.empty(); }
  bool operator==(const TokenBundle&) const = default;
};

/// Splits an identifier on underscores and camel-case humps and lowercases the
/// pieces: "itemCount" and "item_count" both give {"item", "count"}.
std::vector<std::string> split_identifier(std::string_view identifier);

/// Normalizes free text (docstrings, queries) into words matching [a-z0-9]+.
std::vector<std::string> normalize_words(std::string_view text);

TokenBundle tokenize_code(const FunctionUnit& unit, const Caps& caps = {});

/// Collapses units whose comment-stripped, whitespace-collapsed source is
/// identical. Keeps the first occurrence and input order.
std::vector<FunctionUnit> deduplicate(const std::vector<FunctionUnit>& units);

/// True for Solidity elementary type keywords (uint256, address, bytes32, ...).
bool is_elementary_type(std::string_view word);

/// Maps a declared type to the coarse type vocabulary: uintN -> "uint",
/// intN -> "int", bytesN -> "bytes", mapping(...) -> "mapping"; a trailing
/// array suffix gives e.g. "uint[]". Other names pass through unchanged.
std::string normalize_type_name(const std::vector<std::string>& type_tokens);

/// The comparison key used by deduplicate().
std::string normalized_source(std::string_view source);

}  // namespace mmscs
