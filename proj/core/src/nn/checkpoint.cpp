#include "mmscs/nn/checkpoint.hpp"

#include <cstring>
#include <fstream>

#include "mmscs/error.hpp"
#include "mmscs/io/binary.hpp"

namespace mmscs::nn {

void write_checkpoint(std::ostream& out, const Checkpoint& ckpt) {
  io::Writer w(out);
  w.bytes(kCheckpointMagic, sizeof kCheckpointMagic);
  w.put(kCheckpointVersion);
  w.str32(ckpt.config_json);
  w.put(static_cast<std::uint64_t>(ckpt.vocabulary.size()));
  for (const auto& word : ckpt.vocabulary) w.str32(word);
  w.put(static_cast<std::uint64_t>(ckpt.params.seed()));
  w.put(static_cast<std::uint64_t>(ckpt.params.size()));
  for (const auto& [name, m] : ckpt.params.entries()) {
    w.str32(name);
    w.put(std::uint32_t{2});
    w.put(static_cast<std::uint64_t>(m.rows()));
    w.put(static_cast<std::uint64_t>(m.cols()));
    for (Eigen::Index i = 0; i < m.size(); ++i) w.f64(m.data()[i]);
  }
  if (!out) throw Error("failed to write checkpoint");
}

void save_checkpoint(const std::filesystem::path& path, const Checkpoint& ckpt) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot open " + path.string() + " for writing");
  write_checkpoint(out, ckpt);
}

Checkpoint read_checkpoint(std::istream& in) {
  io::Reader r(in, "checkpoint");
  char magic[8];
  r.bytes(magic, sizeof magic);
  if (std::memcmp(magic, kCheckpointMagic, sizeof magic) != 0)
    throw FormatError("not a checkpoint (bad magic)", 0);
  const auto version = r.get<std::uint32_t>();
  if (version != kCheckpointVersion)
    throw FormatError("unsupported checkpoint version " + std::to_string(version), 8);
  std::string config = r.str32();
  const auto words = r.get<std::uint64_t>();
  std::vector<std::string> vocab;
  for (std::uint64_t i = 0; i < words; ++i) vocab.push_back(r.str32(1 << 20));
  const auto seed = r.get<std::uint64_t>();
  Checkpoint ckpt{std::move(config), std::move(vocab), ParameterStore(seed)};
  const auto count = r.get<std::uint64_t>();
  for (std::uint64_t e = 0; e < count; ++e) {
    std::string name = r.str32(1 << 16);
    const auto rank = r.get<std::uint32_t>();
    if (rank > 2) throw FormatError("parameter " + name + " has unsupported rank", r.offset());
    Tensor t;
    for (std::uint32_t k = 0; k < rank; ++k) t.shape.push_back(r.get<std::uint64_t>());
    const std::size_t n = t.element_count();
    if (n > (std::size_t{1} << 32)) throw FormatError("parameter " + name + " is implausibly large", r.offset());
    t.data.resize(n);
    for (auto& x : t.data) x = r.f64();
    ckpt.params.add(name, t.to_matrix());
  }
  return ckpt;
}

Checkpoint load_checkpoint(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open checkpoint " + path.string());
  return read_checkpoint(in);
}

}  // namespace mmscs::nn
