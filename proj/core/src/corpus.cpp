#include "mmscs/corpus.hpp"

#include <algorithm>
#include <fstream>
#include <nlohmann/json.hpp>
#include <sstream>

#include "mmscs/error.hpp"

namespace mmscs {

using nlohmann::ordered_json;

std::string to_json_line(const FunctionUnit& u) {
  ordered_json j;
  j["id"] = u.id;
  j["kind"] = std::string(to_string(u.kind));
  j["name"] = u.name;
  j["code"] = u.source;
  j["docstring"] = u.docstring ? ordered_json(*u.docstring) : ordered_json(nullptr);
  j["path"] = u.path;
  j["span"] = {u.span.start, u.span.end};
  j["bytes"] = {u.byte_begin, u.byte_end};
  j["contract"] = u.contract;
  ordered_json vars = ordered_json::object();
  for (const auto& [k, v] : u.state_vars) vars[k] = v;
  j["state_vars"] = vars;
  return j.dump();
}

FunctionUnit from_json_line(const std::string& line) {
  ordered_json j;
  try {
    j = ordered_json::parse(line);
  } catch (const ordered_json::parse_error& e) {
    throw ParseError(std::string("corpus line is not JSON: ") + e.what(), e.byte);
  }
  try {
    FunctionUnit u;
    u.id = j.at("id").get<std::string>();
    u.kind = unit_kind_from_string(j.at("kind").get<std::string>());
    u.name = j.at("name").get<std::string>();
    u.source = j.at("code").get<std::string>();
    if (j.contains("docstring") && !j["docstring"].is_null())
      u.docstring = j["docstring"].get<std::string>();
    u.path = j.value("path", std::string());
    if (j.contains("span")) {
      u.span.start = j["span"].at(0).get<std::size_t>();
      u.span.end = j["span"].at(1).get<std::size_t>();
    }
    if (j.contains("bytes")) {
      u.byte_begin = j["bytes"].at(0).get<std::size_t>();
      u.byte_end = j["bytes"].at(1).get<std::size_t>();
    }
    u.contract = j.value("contract", std::string());
    if (j.contains("state_vars")) {
      for (const auto& [k, v] : j["state_vars"].items()) u.state_vars[k] = v.get<std::string>();
    }
    return u;
  } catch (const ordered_json::exception& e) {
    throw Error(std::string("malformed corpus record: ") + e.what());
  }
}

void write_corpus(std::ostream& out, const std::vector<FunctionUnit>& units) {
  for (const auto& u : units) out << to_json_line(u) << '\n';
}

void write_corpus(const std::filesystem::path& path, const std::vector<FunctionUnit>& units) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write corpus " + path.string());
  write_corpus(out, units);
}

std::vector<FunctionUnit> read_corpus(std::istream& in) {
  std::vector<FunctionUnit> units;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    try {
      units.push_back(from_json_line(line));
    } catch (const Error& e) {
      throw Error("corpus line " + std::to_string(lineno) + ": " + e.what());
    }
  }
  return units;
}

std::vector<FunctionUnit> read_corpus(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot read corpus " + path.string());
  return read_corpus(in);
}

std::vector<FunctionUnit> ingest_directory(const std::filesystem::path& root, bool dedup,
                                           std::vector<std::string>* warnings) {
  std::vector<std::filesystem::path> files;
  for (const auto& entry : std::filesystem::recursive_directory_iterator(root)) {
    if (entry.is_regular_file() && entry.path().extension() == ".sol") files.push_back(entry.path());
  }
  std::sort(files.begin(), files.end());
  std::vector<FunctionUnit> units;
  for (const auto& f : files) {
    std::ifstream in(f, std::ios::binary);
    std::stringstream buf;
    buf << in.rdbuf();
    const std::string rel = std::filesystem::relative(f, root).generic_string();
    try {
      auto file_units = extract_functions(buf.str(), rel);
      units.insert(units.end(), file_units.begin(), file_units.end());
    } catch (const ParseError& e) {
      if (warnings) warnings->push_back(rel + ": " + e.what());
    }
  }
  return dedup ? deduplicate(units) : units;
}

ContextIndex::ContextIndex(const std::vector<FunctionUnit>& units) {
  for (const auto& u : units) groups_[{u.path, u.contract}].push_back(u);
}

std::vector<FunctionUnit> ContextIndex::context_of(const FunctionUnit& unit) const {
  auto it = groups_.find({unit.path, unit.contract});
  if (it == groups_.end()) return {unit};
  return it->second;
}

}  // namespace mmscs
