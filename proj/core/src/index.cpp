#include "mmscs/index.hpp"

#include <algorithm>
#include <cstring>
#include <fstream>
#include <nlohmann/json.hpp>

#include "mmscs/error.hpp"
#include "mmscs/io/binary.hpp"

namespace mmscs {

void SearchIndex::add(const std::string& id, const nn::Vector& vector, const std::string& metadata) {
  if (static_cast<std::size_t>(vector.size()) != dim_)
    throw ConfigError("vector width " + std::to_string(vector.size()) + " does not match index width " +
                      std::to_string(dim_));
  if (by_id_.contains(id)) throw ConfigError("duplicate id '" + id + "'");
  if (!vector.allFinite()) throw NumericError("non-finite vector for '" + id + "'");
  const double norm = vector.norm();
  if (norm == 0.0) throw NumericError("zero vector for '" + id + "'");
  by_id_.emplace(id, records_.size());
  records_.push_back({id, vector});
  norms_.push_back(norm);
  metadata_.push_back(metadata);
  if (backend_) backend_->rebuild(*this);
}

std::vector<SearchHit> SearchIndex::search(const nn::Vector& query, std::size_t k) const {
  if (records_.empty()) throw ConfigError("search on an empty index");
  if (k == 0) throw ConfigError("k must be at least 1");
  if (static_cast<std::size_t>(query.size()) != dim_)
    throw ConfigError("query width " + std::to_string(query.size()) + " does not match index width " +
                      std::to_string(dim_));
  const double qn = query.norm();
  if (qn == 0.0 || !std::isfinite(qn)) throw NumericError("query vector is zero or non-finite");
  if (backend_) return backend_->search(*this, query, k);

  std::vector<SearchHit> hits;
  hits.reserve(records_.size());
  for (std::size_t i = 0; i < records_.size(); ++i) {
    const double c = records_[i].vector.dot(query) / (norms_[i] * qn);
    hits.push_back({records_[i].id, std::clamp(c, -1.0, 1.0)});
  }
  const std::size_t n = std::min(k, hits.size());
  auto better = [](const SearchHit& a, const SearchHit& b) {
    return a.score != b.score ? a.score > b.score : a.id < b.id;
  };
  std::partial_sort(hits.begin(), hits.begin() + static_cast<std::ptrdiff_t>(n), hits.end(), better);
  hits.resize(n);
  return hits;
}

const nn::Vector& SearchIndex::vector(const std::string& id) const {
  auto it = by_id_.find(id);
  if (it == by_id_.end()) throw ConfigError("unknown id '" + id + "'");
  return records_[it->second].vector;
}

const std::string& SearchIndex::metadata(const std::string& id) const {
  auto it = by_id_.find(id);
  if (it == by_id_.end()) throw ConfigError("unknown id '" + id + "'");
  return metadata_[it->second];
}

void SearchIndex::set_backend(std::shared_ptr<SearchBackend> backend) {
  backend_ = std::move(backend);
  if (backend_) backend_->rebuild(*this);
}

void SearchIndex::write(std::ostream& out) const {
  io::Writer w(out);
  w.bytes(kIndexMagic, sizeof kIndexMagic);
  w.put(kIndexVersion);
  w.put(static_cast<std::uint32_t>(dim_));
  w.put(static_cast<std::uint64_t>(records_.size()));
  for (const auto& r : records_) {
    w.str32(r.id);
    for (Eigen::Index i = 0; i < r.vector.size(); ++i) w.f64(r.vector(i));
  }
  if (!out) throw Error("failed to write index");
}

SearchIndex SearchIndex::read(std::istream& in) {
  io::Reader r(in, "index");
  char magic[8];
  r.bytes(magic, sizeof magic);
  if (std::memcmp(magic, kIndexMagic, sizeof magic) != 0)
    throw FormatError("not an index file (bad magic)", 0);
  const auto version = r.get<std::uint32_t>();
  if (version != kIndexVersion)
    throw FormatError("unsupported index version " + std::to_string(version), 8);
  SearchIndex index(r.get<std::uint32_t>());
  const auto count = r.get<std::uint64_t>();
  for (std::uint64_t i = 0; i < count; ++i) {
    const std::size_t at = r.offset();
    std::string id = r.str32(1 << 20);
    nn::Vector v(static_cast<Eigen::Index>(index.dim_));
    for (Eigen::Index j = 0; j < v.size(); ++j) v(j) = r.f64();
    try {
      index.add(id, v);
    } catch (const Error& e) {
      throw FormatError(std::string("bad record: ") + e.what(), at);
    }
  }
  return index;
}

std::filesystem::path SearchIndex::metadata_path(const std::filesystem::path& path) {
  return path.string() + ".meta.jsonl";
}

void SearchIndex::save(const std::filesystem::path& path) const {
  {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot open " + path.string() + " for writing");
    write(out);
  }
  std::ofstream meta(metadata_path(path), std::ios::trunc);
  for (std::size_t i = 0; i < records_.size(); ++i) {
    nlohmann::ordered_json j;
    j["id"] = records_[i].id;
    j["meta"] = metadata_[i].empty() ? nlohmann::json() : nlohmann::json::parse(metadata_[i]);
    meta << j.dump() << '\n';
  }
}

SearchIndex SearchIndex::load(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open index " + path.string());
  SearchIndex index = read(in);
  std::ifstream meta(metadata_path(path));
  std::string line;
  std::size_t lineno = 0;
  while (meta && std::getline(meta, line)) {
    ++lineno;
    if (line.empty()) continue;
    try {
      const auto j = nlohmann::json::parse(line);
      auto it = index.by_id_.find(j.at("id").get<std::string>());
      if (it == index.by_id_.end()) continue;
      const auto& m = j.at("meta");
      index.metadata_[it->second] = m.is_null() ? std::string() : m.dump();
    } catch (const nlohmann::json::exception& e) {
      throw ParseError(std::string("bad metadata line: ") + e.what(), 0, lineno, 1);
    }
  }
  return index;
}

bool SearchIndex::operator==(const SearchIndex& other) const {
  if (dim_ != other.dim_ || records_.size() != other.records_.size()) return false;
  for (std::size_t i = 0; i < records_.size(); ++i) {
    const auto& a = records_[i].vector;
    const auto& b = other.records_[i].vector;
    if (records_[i].id != other.records_[i].id || metadata_[i] != other.metadata_[i]) return false;
    if (std::memcmp(a.data(), b.data(), sizeof(double) * static_cast<std::size_t>(a.size())) != 0)
      return false;
  }
  return true;
}

}  // namespace mmscs
