#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "mmscs/frontend.hpp"

namespace mmscs {

/// Word -> index map. Index 0 is PAD and 1 is UNK.
class Vocabulary {
 public:
  static constexpr std::size_t kPad = 0;
  static constexpr std::size_t kUnk = 1;

  Vocabulary();

  /// Builds from raw word sequences. Words seen fewer than `min_count` times map
  /// to UNK. Order: descending frequency, ties broken lexicographically.
  static Vocabulary build(const std::vector<std::vector<std::string>>& sequences,
                          std::size_t min_count = 2);

  /// Rebuilds from a stored word list (index order, including PAD and UNK).
  static Vocabulary from_words(std::vector<std::string> words);

  std::size_t index(std::string_view word) const;
  std::vector<std::size_t> indices(const std::vector<std::string>& words) const;
  const std::string& word(std::size_t index) const { return words_.at(index); }
  const std::vector<std::string>& words() const { return words_; }
  std::size_t size() const { return words_.size(); }
  bool contains(std::string_view word) const;

  bool operator==(const Vocabulary& other) const { return words_ == other.words_; }

 private:
  std::vector<std::string> words_;
  std::unordered_map<std::string, std::size_t> lookup_;
};

/// Collects the sequences build() should see: T, F and A of every bundle plus
/// the normalized docstring words.
std::vector<std::vector<std::string>> vocabulary_corpus(
    const std::vector<TokenBundle>& bundles, const std::vector<std::string>& docstrings);

}  // namespace mmscs
