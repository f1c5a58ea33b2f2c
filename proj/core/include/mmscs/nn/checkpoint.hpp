#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "mmscs/nn/tensor.hpp"

namespace mmscs::nn {

inline constexpr char kCheckpointMagic[8] = {'M', 'M', 'S', 'C', 'S', 'C', 'K', 'P'};
inline constexpr std::uint32_t kCheckpointVersion = 1;

/// Everything needed to rebuild a trained model.
struct Checkpoint {
  std::string config_json;
  std::vector<std::string> vocabulary;  // words in index order
  ParameterStore params;
};

/// Layout: magic, u32 version, u32 length + config JSON, u64 word count and
/// (u32 length + bytes) per word, u64 seed, u64 entry count, then per entry
/// u32 name length, name, u32 rank, u64 per dimension, little-endian float64s.
void write_checkpoint(std::ostream& out, const Checkpoint& ckpt);
void save_checkpoint(const std::filesystem::path& path, const Checkpoint& ckpt);
/// Throws FormatError (bad magic, unknown version, truncation with offset).
Checkpoint read_checkpoint(std::istream& in);
Checkpoint load_checkpoint(const std::filesystem::path& path);

}  // namespace mmscs::nn
