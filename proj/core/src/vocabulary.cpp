#include "mmscs/vocabulary.hpp"

#include <algorithm>
#include <map>

#include "mmscs/error.hpp"

namespace mmscs {

Vocabulary::Vocabulary() : words_{"<pad>", "<unk>"}, lookup_{{"<pad>", kPad}, {"<unk>", kUnk}} {}

Vocabulary Vocabulary::from_words(std::vector<std::string> words) {
  if (words.size() < 2) throw Error("vocabulary needs at least PAD and UNK entries");
  Vocabulary v;
  v.words_ = std::move(words);
  v.lookup_.clear();
  for (std::size_t i = 0; i < v.words_.size(); ++i) {
    if (!v.lookup_.emplace(v.words_[i], i).second)
      throw Error("duplicate vocabulary word '" + v.words_[i] + "'");
  }
  return v;
}

Vocabulary Vocabulary::build(const std::vector<std::vector<std::string>>& sequences,
                             std::size_t min_count) {
  if (min_count < 1) throw ConfigError("min_count must be >= 1");
  std::map<std::string, std::size_t> counts;
  for (const auto& seq : sequences) {
    for (const auto& w : seq) ++counts[w];
  }
  std::vector<std::pair<std::string, std::size_t>> kept;
  for (const auto& [w, c] : counts) {
    if (c >= min_count) kept.emplace_back(w, c);
  }
  std::stable_sort(kept.begin(), kept.end(),
                   [](const auto& a, const auto& b) { return a.second > b.second; });
  std::vector<std::string> words = {"<pad>", "<unk>"};
  for (auto& [w, c] : kept) {
    if (w == "<pad>" || w == "<unk>") continue;
    words.push_back(w);
  }
  return from_words(std::move(words));
}

std::size_t Vocabulary::index(std::string_view word) const {
  auto it = lookup_.find(std::string(word));
  return it == lookup_.end() ? kUnk : it->second;
}

std::vector<std::size_t> Vocabulary::indices(const std::vector<std::string>& words) const {
  std::vector<std::size_t> out;
  out.reserve(words.size());
  for (const auto& w : words) out.push_back(index(w));
  return out;
}

bool Vocabulary::contains(std::string_view word) const {
  return lookup_.contains(std::string(word));
}

std::vector<std::vector<std::string>> vocabulary_corpus(
    const std::vector<TokenBundle>& bundles, const std::vector<std::string>& docstrings) {
  std::vector<std::vector<std::string>> out;
  out.reserve(bundles.size() * 3 + docstrings.size());
  for (const auto& b : bundles) {
    out.push_back(b.tokens);
    out.push_back(b.name);
    out.push_back(b.api);
  }
  for (const auto& d : docstrings) out.push_back(normalize_words(d));
  return out;
}

}  // namespace mmscs
