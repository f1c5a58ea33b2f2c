#pragma once

#include <memory>
#include <string>
#include <string_view>
#include <sys/types.h>

#include "mmscs/nn/tensor.hpp"

namespace mmscs {

/// Source of query embeddings other than the built-in query encoder.
class EmbeddingProvider {
 public:
  virtual ~EmbeddingProvider() = default;
  virtual nn::Vector embed(std::string_view text) = 0;
};

/// Talks to a long-running child process over its standard streams: one
/// {"text": "..."} request per line, one {"vector": [...]} response per line.
class SubprocessProvider : public EmbeddingProvider {
 public:
  /// `command` runs under /bin/sh -c.
  explicit SubprocessProvider(const std::string& command);
  ~SubprocessProvider() override;
  SubprocessProvider(const SubprocessProvider&) = delete;
  SubprocessProvider& operator=(const SubprocessProvider&) = delete;

  nn::Vector embed(std::string_view text) override;

 private:
  std::string command_;
  pid_t pid_ = -1;
  int to_child_ = -1;
  int from_child_ = -1;
  std::string buffer_;
};

}  // namespace mmscs
