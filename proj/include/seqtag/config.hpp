#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <string>
#include <string_view>
#include <vector>

namespace seqtag {

inline constexpr std::string_view kVersion = "0.1.0";

// Flat key/value settings. Text form is one "key = value" per line; '#'
// starts a comment.
class Config {
 public:
  void set(std::string key, std::string value);
  bool has(std::string_view key) const;

  std::string get(std::string_view key, std::string_view fallback = {}) const;
  std::string require(std::string_view key) const;
  std::int64_t get_int(std::string_view key, std::int64_t fallback) const;
  std::size_t get_size(std::string_view key, std::size_t fallback) const;
  std::uint64_t get_u64(std::string_view key, std::uint64_t fallback) const;
  double get_double(std::string_view key, double fallback) const;
  bool get_bool(std::string_view key, bool fallback) const;
  std::vector<std::size_t> get_sizes(std::string_view key, std::vector<std::size_t> fallback) const;

  // Entries of `overrides` replace ours.
  void merge(const Config& overrides);

  static Config parse(std::istream& in);
  static Config load(const std::filesystem::path& path);

  const std::map<std::string, std::string, std::less<>>& entries() const { return entries_; }

  // FNV-1a over the sorted entries, excluding output destinations, as 16
  // hex digits.
  std::string hash() const;

 private:
  std::map<std::string, std::string, std::less<>> entries_;
};

// "# seqtag <version> config=<hash> seed=<seed>"
std::string output_header(const Config& config, std::uint64_t seed);

}  // namespace seqtag
