#include "seqtag/config.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <istream>

#include "seqtag/errors.hpp"

namespace seqtag {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

template <typename T>
T parse_number(std::string_view key, std::string_view text) {
  T value{};
  auto [end, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || end != text.data() + text.size()) {
    throw ConfigError("config key '" + std::string(key) + "': '" + std::string(text) + "' is not a valid number");
  }
  return value;
}

bool is_destination(std::string_view key) {
  return key == "out" || key == "log" || key == "output" || key == "out_dir" || key == "csv";
}

}  // namespace

void Config::set(std::string key, std::string value) { entries_[std::move(key)] = std::move(value); }

bool Config::has(std::string_view key) const { return entries_.find(key) != entries_.end(); }

std::string Config::get(std::string_view key, std::string_view fallback) const {
  auto it = entries_.find(key);
  return it == entries_.end() ? std::string(fallback) : it->second;
}

std::string Config::require(std::string_view key) const {
  auto it = entries_.find(key);
  if (it == entries_.end() || it->second.empty()) throw ConfigError("missing required setting '" + std::string(key) + "'");
  return it->second;
}

std::int64_t Config::get_int(std::string_view key, std::int64_t fallback) const {
  auto it = entries_.find(key);
  return it == entries_.end() ? fallback : parse_number<std::int64_t>(key, it->second);
}

std::size_t Config::get_size(std::string_view key, std::size_t fallback) const {
  auto it = entries_.find(key);
  return it == entries_.end() ? fallback : parse_number<std::size_t>(key, it->second);
}

std::uint64_t Config::get_u64(std::string_view key, std::uint64_t fallback) const {
  auto it = entries_.find(key);
  return it == entries_.end() ? fallback : parse_number<std::uint64_t>(key, it->second);
}

double Config::get_double(std::string_view key, double fallback) const {
  auto it = entries_.find(key);
  return it == entries_.end() ? fallback : parse_number<double>(key, it->second);
}

bool Config::get_bool(std::string_view key, bool fallback) const {
  auto it = entries_.find(key);
  if (it == entries_.end()) return fallback;
  const auto& v = it->second;
  if (v == "1" || v == "true" || v == "yes" || v == "on") return true;
  if (v == "0" || v == "false" || v == "no" || v == "off") return false;
  throw ConfigError("config key '" + std::string(key) + "': '" + v + "' is not a boolean");
}

std::vector<std::size_t> Config::get_sizes(std::string_view key, std::vector<std::size_t> fallback) const {
  auto it = entries_.find(key);
  if (it == entries_.end()) return fallback;
  std::vector<std::size_t> out;
  std::string_view rest = it->second;
  while (!rest.empty()) {
    const auto comma = rest.find(',');
    out.push_back(parse_number<std::size_t>(key, trim(rest.substr(0, comma))));
    if (comma == std::string_view::npos) break;
    rest.remove_prefix(comma + 1);
  }
  return out;
}

void Config::merge(const Config& overrides) {
  for (const auto& [k, v] : overrides.entries_) entries_[k] = v;
}

Config Config::parse(std::istream& in) {
  Config config;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::string_view view = line;
    if (auto hash = view.find('#'); hash != std::string_view::npos) view = view.substr(0, hash);
    view = trim(view);
    if (view.empty()) continue;
    const auto eq = view.find('=');
    if (eq == std::string_view::npos) throw ParseError("expected 'key = value'", line_no);
    auto key = trim(view.substr(0, eq));
    if (key.empty()) throw ParseError("empty config key", line_no);
    config.set(std::string(key), std::string(trim(view.substr(eq + 1))));
  }
  return config;
}

Config Config::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file '" + path.string() + "'");
  return parse(in);
}

std::string Config::hash() const {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  auto feed = [&](std::string_view s) {
    for (unsigned char c : s) {
      h ^= c;
      h *= 0x100000001b3ULL;
    }
  };
  for (const auto& [k, v] : entries_) {
    if (is_destination(k)) continue;
    feed(k);
    feed("=");
    feed(v);
    feed("\n");
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::string output_header(const Config& config, std::uint64_t seed) {
  return "# seqtag " + std::string(kVersion) + " config=" + config.hash() + " seed=" + std::to_string(seed);
}

}  // namespace seqtag
