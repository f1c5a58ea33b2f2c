#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "mmscs/nn/tensor.hpp"

namespace mmscs {

struct SearchHit {
  std::string id;
  double score = 0.0;
  bool operator==(const SearchHit&) const = default;
};

struct EmbeddingRecord {
  std::string id;
  nn::Vector vector;
};

class SearchIndex;

/// Slot for an approximate search structure. None ships; the exact scan is used
/// when no backend is installed.
class SearchBackend {
 public:
  virtual ~SearchBackend() = default;
  virtual void rebuild(const SearchIndex& index) = 0;
  virtual std::vector<SearchHit> search(const SearchIndex& index, const nn::Vector& query,
                                        std::size_t k) const = 0;
};

inline constexpr char kIndexMagic[8] = {'C', 'E', 'D', 'G', 'I', 'D', 'X', '1'};
inline constexpr std::uint32_t kIndexVersion = 1;

/// Code embeddings with cosine top-k search by exact scan.
class SearchIndex {
 public:
  explicit SearchIndex(std::size_t dim = 0) : dim_(dim) {}

  /// Throws ConfigError on a duplicate id or wrong width, NumericError on a zero
  /// or non-finite vector. `metadata` is JSON text (empty for none).
  void add(const std::string& id, const nn::Vector& vector, const std::string& metadata = {});

  /// Scores by cosine, descending; equal scores by ascending id. Returns
  /// min(k, size()) hits. Throws on an empty index, k == 0 or a zero query.
  std::vector<SearchHit> search(const nn::Vector& query, std::size_t k) const;

  bool contains(const std::string& id) const { return by_id_.contains(id); }
  const nn::Vector& vector(const std::string& id) const;
  const std::string& metadata(const std::string& id) const;
  const std::vector<EmbeddingRecord>& records() const { return records_; }
  std::size_t size() const { return records_.size(); }
  std::size_t dim() const { return dim_; }

  void set_backend(std::shared_ptr<SearchBackend> backend);

  /// Binary layout: magic "CEDGIDX1", u32 version, u32 dim, u64 count, then per
  /// record u32 id length, id bytes, dim little-endian float64s.
  void write(std::ostream& out) const;
  static SearchIndex read(std::istream& in);
  /// Writes the index and, next to it, `<path>.meta.jsonl` holding metadata.
  void save(const std::filesystem::path& path) const;
  static SearchIndex load(const std::filesystem::path& path);
  static std::filesystem::path metadata_path(const std::filesystem::path& path);

  bool operator==(const SearchIndex& other) const;

 private:
  std::size_t dim_;
  std::vector<EmbeddingRecord> records_;
  std::vector<double> norms_;
  std::vector<std::string> metadata_;
  std::map<std::string, std::size_t> by_id_;
  std::shared_ptr<SearchBackend> backend_;
};

}  // namespace mmscs
