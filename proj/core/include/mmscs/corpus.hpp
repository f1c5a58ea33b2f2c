#pragma once

#include <filesystem>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "mmscs/frontend.hpp"

namespace mmscs {

/// One JSON Lines record:
/// {"id","kind","name","code","docstring","path","span":[s,e],"contract","state_vars"}
std::string to_json_line(const FunctionUnit& unit);
FunctionUnit from_json_line(const std::string& line);

void write_corpus(std::ostream& out, const std::vector<FunctionUnit>& units);
void write_corpus(const std::filesystem::path& path, const std::vector<FunctionUnit>& units);
std::vector<FunctionUnit> read_corpus(std::istream& in);
std::vector<FunctionUnit> read_corpus(const std::filesystem::path& path);

/// Extracts every unit from all *.sol files under `root` (sorted by path).
std::vector<FunctionUnit> ingest_directory(const std::filesystem::path& root, bool dedup,
                                           std::vector<std::string>* warnings = nullptr);

/// Units sharing the same (path, contract) as each unit: its contract context.
class ContextIndex {
 public:
  explicit ContextIndex(const std::vector<FunctionUnit>& units);
  std::vector<FunctionUnit> context_of(const FunctionUnit& unit) const;

 private:
  std::map<std::pair<std::string, std::string>, std::vector<FunctionUnit>> groups_;
};

}  // namespace mmscs
