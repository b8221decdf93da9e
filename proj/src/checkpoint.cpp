#include "seqtag/checkpoint.hpp"

#include <algorithm>
#include <fstream>

#include "seqtag/binary_io.hpp"
#include "seqtag/errors.hpp"

namespace seqtag {

namespace {
constexpr char kMagic[4] = {'S', 'E', 'Q', 'T'};
}

void Checkpoint::set(std::string key, std::string value) {
  for (auto& [k, v] : meta) {
    if (k == key) {
      v = std::move(value);
      return;
    }
  }
  meta.emplace_back(std::move(key), std::move(value));
}

const std::string& Checkpoint::get(std::string_view key) const {
  for (const auto& [k, v] : meta)
    if (k == key) return v;
  throw ParseError("checkpoint lacks metadata '" + std::string(key) + "'");
}

bool Checkpoint::has(std::string_view key) const {
  return std::any_of(meta.begin(), meta.end(), [&](const auto& e) { return e.first == key; });
}

void Checkpoint::add_parameters(const ad::ParameterSet& params) {
  for (const auto& [name, t] : params) tensors.emplace_back(name, t.detach());
}

ad::ParameterSet Checkpoint::parameters() const {
  ad::ParameterSet params;
  for (const auto& [name, t] : tensors) params.add(name, t.clone());
  return params;
}

void write_checkpoint(std::ostream& out, const Checkpoint& ckpt) {
  out.write(kMagic, 4);
  binary::put_u32(out, Checkpoint::kVersion);
  binary::put_u32(out, static_cast<std::uint32_t>(ckpt.meta.size()));
  for (const auto& [k, v] : ckpt.meta) {
    binary::put_string(out, k);
    binary::put_string(out, v);
  }
  binary::put_u32(out, static_cast<std::uint32_t>(ckpt.tensors.size()));
  for (const auto& [name, t] : ckpt.tensors) {
    binary::put_string(out, name);
    binary::put_u32(out, static_cast<std::uint32_t>(t.rank()));
    for (auto d : t.shape()) binary::put_u64(out, d);
    for (double v : t.values()) binary::put_f64(out, v);
  }
}

Checkpoint read_checkpoint(std::istream& in) {
  char magic[4];
  binary::read_exact(in, magic, 4);
  if (!std::equal(magic, magic + 4, kMagic)) throw ParseError("not a SEQT checkpoint");
  const auto version = binary::get_u32(in);
  if (version != Checkpoint::kVersion) throw ParseError("unsupported checkpoint version " + std::to_string(version));
  Checkpoint ckpt;
  const auto n_meta = binary::get_u32(in);
  for (std::uint32_t i = 0; i < n_meta; ++i) {
    auto k = binary::get_string(in);
    auto v = binary::get_string(in);
    ckpt.meta.emplace_back(std::move(k), std::move(v));
  }
  const auto n_tensors = binary::get_u32(in);
  for (std::uint32_t i = 0; i < n_tensors; ++i) {
    auto name = binary::get_string(in);
    const auto rank = binary::get_u32(in);
    if (rank > 8) throw ParseError("tensor '" + name + "' has implausible rank " + std::to_string(rank));
    ad::Shape shape(rank);
    std::uint64_t count = 1;
    for (auto& d : shape) {
      d = binary::get_u64(in);
      count *= d;
    }
    if (count > (1ULL << 32)) throw ParseError("tensor '" + name + "' is implausibly large");
    std::vector<double> values(count);
    for (auto& v : values) v = binary::get_f64(in);
    ckpt.tensors.emplace_back(std::move(name), ad::Tensor(std::move(shape), std::move(values)));
  }
  return ckpt;
}

void save_checkpoint(const std::filesystem::path& path, const Checkpoint& ckpt) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write checkpoint '" + path.string() + "'");
  write_checkpoint(out, ckpt);
  if (!out) throw IoError("write failed for '" + path.string() + "'");
}

Checkpoint load_checkpoint(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open checkpoint '" + path.string() + "'");
  return read_checkpoint(in);
}

}  // namespace seqtag
