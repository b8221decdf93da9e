#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "seqtag/autodiff.hpp"

namespace seqtag {

// Self-describing model file:
//   "SEQT", u32 version,
//   u32 n, n x (string key, string value)          -- metadata
//   u32 m, m x (string name, u32 rank, rank x u64 dim, f64 values...)
// Strings are u32 length + bytes; all integers and floats little-endian.
struct Checkpoint {
  static constexpr std::uint32_t kVersion = 1;

  std::vector<std::pair<std::string, std::string>> meta;
  std::vector<std::pair<std::string, ad::Tensor>> tensors;

  void set(std::string key, std::string value);
  const std::string& get(std::string_view key) const;  // throws ParseError
  bool has(std::string_view key) const;

  void add_parameters(const ad::ParameterSet& params);
  // Fills a parameter set in checkpoint order.
  ad::ParameterSet parameters() const;
};

void write_checkpoint(std::ostream& out, const Checkpoint& ckpt);
Checkpoint read_checkpoint(std::istream& in);

void save_checkpoint(const std::filesystem::path& path, const Checkpoint& ckpt);
Checkpoint load_checkpoint(const std::filesystem::path& path);

}  // namespace seqtag
