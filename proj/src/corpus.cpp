#include "seqtag/corpus.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <iomanip>
#include <istream>
#include <numeric>
#include <ostream>
#include <sstream>

#include "seqtag/errors.hpp"
#include "seqtag/rng.hpp"

namespace seqtag {

std::string_view tag_type(std::string_view tag) {
  if (tag.size() > 2 && tag[1] == '-' && (tag[0] == 'B' || tag[0] == 'I')) return tag.substr(2);
  return tag;
}

bool is_outside(std::string_view tag) { return tag_type(tag) == kOutside; }

std::string ascii_lower(std::string_view s) {
  std::string out(s);
  for (auto& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

namespace {

bool iequals(std::string_view a, std::string_view b) {
  return a.size() == b.size() && std::equal(a.begin(), a.end(), b.begin(), [](char x, char y) {
           return std::tolower(static_cast<unsigned char>(x)) == std::tolower(static_cast<unsigned char>(y));
         });
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

std::vector<std::string> split_list(std::string_view s) {
  std::vector<std::string> out;
  std::size_t pos = 0;
  while (pos <= s.size()) {
    const auto next = std::min(s.find(',', pos), s.size());
    const auto item = trim(s.substr(pos, next - pos));
    if (!item.empty()) out.emplace_back(item);
    pos = next + 1;
  }
  return out;
}

}  // namespace

// ---------------------------------------------------------------------------
// Partition

Partition::Partition(std::vector<std::string> strong, std::vector<std::string> weak)
    : strong_(std::move(strong)), weak_(std::move(weak)) {
  for (const auto& s : strong_) {
    if (iequals(s, kOutside)) throw ConfigError("O cannot be an entity group member");
    for (const auto& w : weak_) {
      if (iequals(s, w)) throw ConfigError("type '" + s + "' is in both Strong and Weak groups");
    }
  }
  for (const auto& w : weak_) {
    if (iequals(w, kOutside)) throw ConfigError("O cannot be an entity group member");
  }
}

Partition Partition::standard() {
  return Partition({"geo", "tim", "org", "per", "gpe"}, {"art", "eve", "nat"});
}

Partition Partition::parse(std::string_view strong, std::string_view weak) {
  return Partition(split_list(strong), split_list(weak));
}

bool Partition::contains(EntityGroup group, std::string_view type) const {
  const auto& members = group == EntityGroup::strong ? strong_ : weak_;
  return std::any_of(members.begin(), members.end(), [&](const std::string& m) { return iequals(m, type); });
}

void Partition::check_covers(std::string_view type) const {
  if (type == kOutside || is_strong(type) || is_weak(type)) return;
  throw VocabularyError("entity type '" + std::string(type) + "' belongs to neither the Strong nor the Weak group");
}

// ---------------------------------------------------------------------------
// TagSet

TagSet::TagSet() : tags_{std::string(kOutside)} {}

void TagSet::add(std::string_view tag) {
  if (find(tag)) return;
  auto before = [](std::string_view a, std::string_view b) {
    if (is_outside(a) != is_outside(b)) return is_outside(a);
    const auto ta = tag_type(a), tb = tag_type(b);
    return ta != tb ? ta < tb : a < b;
  };
  auto pos = std::upper_bound(tags_.begin() + 1, tags_.end(), tag, before);
  tags_.insert(pos, std::string(tag));
}

std::optional<std::size_t> TagSet::find(std::string_view tag) const {
  auto it = std::find(tags_.begin(), tags_.end(), tag);
  if (it == tags_.end()) return std::nullopt;
  return static_cast<std::size_t>(it - tags_.begin());
}

std::size_t TagSet::index(std::string_view tag) const {
  if (auto i = find(tag)) return *i;
  throw VocabularyError("unknown tag '" + std::string(tag) + "'");
}

std::vector<std::string> TagSet::types() const {
  std::vector<std::string> out;
  for (const auto& t : tags_) {
    std::string ty(tag_type(t));
    if (std::find(out.begin(), out.end(), ty) == out.end()) out.push_back(std::move(ty));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Corpus I/O

std::size_t Corpus::token_count() const {
  return std::accumulate(sentences.begin(), sentences.end(), std::size_t{0},
                         [](std::size_t n, const Sentence& s) { return n + s.size(); });
}

CorpusFormat parse_format(std::string_view name) {
  if (name == "conll" || name == "conll-2col") return CorpusFormat::conll;
  if (name == "csv" || name == "csv-sentence") return CorpusFormat::csv;
  throw ConfigError("unknown corpus format '" + std::string(name) + "'");
}

namespace {

std::vector<std::string_view> split_fields(std::string_view line) {
  std::vector<std::string_view> out;
  if (line.find('\t') != std::string_view::npos) {
    std::size_t pos = 0;
    while (true) {
      const auto next = line.find('\t', pos);
      out.push_back(line.substr(pos, next == std::string_view::npos ? line.npos : next - pos));
      if (next == std::string_view::npos) break;
      pos = next + 1;
    }
    return out;
  }
  std::size_t pos = 0;
  while (pos < line.size()) {
    while (pos < line.size() && (line[pos] == ' ')) ++pos;
    if (pos >= line.size()) break;
    const auto end = std::min(line.find(' ', pos), line.size());
    out.push_back(line.substr(pos, end - pos));
    pos = end;
  }
  return out;
}

// RFC 4180 style: comma separated, double quotes escape commas and quotes.
std::vector<std::string> split_csv(std::string_view line, std::size_t line_no) {
  std::vector<std::string> out(1);
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < line.size() && line[i + 1] == '"') {
          out.back() += '"';
          ++i;
        } else {
          quoted = false;
        }
      } else {
        out.back() += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      out.emplace_back();
    } else {
      out.back() += c;
    }
  }
  if (quoted) throw ParseError("unterminated quoted field", line_no);
  return out;
}

class CorpusBuilder {
 public:
  explicit CorpusBuilder(const LoadOptions& options) : options_(options) {
    corpus_.split_name = options.split_name;
  }

  void token(std::string surface, std::string tag, std::size_t line_no) {
    if (surface.empty()) throw ParseError("empty token surface", line_no);
    if (tag.empty()) throw ParseError("empty tag", line_no);
    if (options_.frozen && !options_.frozen->find(tag)) {
      throw VocabularyError("unknown tag '" + tag + "' at line " + std::to_string(line_no));
    }
    corpus_.tags.add(tag);
    current_.tokens.push_back(Token{std::move(surface), std::move(tag)});
  }

  void boundary() {
    if (current_.tokens.empty()) return;
    corpus_.sentences.push_back(std::move(current_));
    current_ = Sentence{};
  }

  Corpus finish() {
    boundary();
    return std::move(corpus_);
  }

 private:
  const LoadOptions& options_;
  Corpus corpus_;
  Sentence current_;
};

Corpus read_conll(std::istream& in, const LoadOptions& options) {
  CorpusBuilder builder(options);
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (trim(line).empty()) {
      builder.boundary();
      continue;
    }
    const auto fields = split_fields(line);
    // Header lines ("# seqtag ...") carry no tab and more fields than any token row.
    if (line.front() == '#' && line.find('\t') == std::string::npos && fields.size() > 3) continue;
    if (fields.size() == 1 && options.allow_untagged) {
      builder.token(std::string(fields[0]), std::string(kOutside), line_no);
      continue;
    }
    if (fields.size() < 2) throw ParseError("expected 'surface<TAB>tag'", line_no);
    const std::size_t column = options.tag_column < 0 ? fields.size() - 1 : static_cast<std::size_t>(options.tag_column);
    if (column >= fields.size()) throw ParseError("missing tag column " + std::to_string(column), line_no);
    builder.token(std::string(fields[0]), std::string(fields[column]), line_no);
  }
  return builder.finish();
}

Corpus read_csv(std::istream& in, const LoadOptions& options) {
  CorpusBuilder builder(options);
  std::string line;
  std::size_t line_no = 0;
  if (!std::getline(in, line)) return builder.finish();
  ++line_no;
  if (!line.empty() && line.back() == '\r') line.pop_back();
  const auto header = split_csv(line, line_no);
  auto column = [&](std::initializer_list<std::string_view> names) -> std::size_t {
    for (std::size_t i = 0; i < header.size(); ++i)
      for (auto n : names)
        if (iequals(trim(header[i]), n)) return i;
    throw ParseError("csv header lacks column '" + std::string(*names.begin()) + "'", line_no);
  };
  const std::size_t id_col = column({"sentence_id", "Sentence #"});
  const std::size_t surface_col = column({"surface", "Word"});
  const std::size_t tag_col = column({"tag"});
  const std::size_t needed = std::max({id_col, surface_col, tag_col}) + 1;

  std::optional<std::string> current_id;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (trim(line).empty()) continue;
    auto fields = split_csv(line, line_no);
    if (fields.size() < needed) throw ParseError("expected sentence_id,surface,tag", line_no);
    std::string id(trim(fields[id_col]));
    // An empty id continues the previous sentence.
    if (!id.empty() && id != current_id) {
      builder.boundary();
      current_id = std::move(id);
    } else if (id.empty() && !current_id) {
      throw ParseError("first row has no sentence id", line_no);
    }
    builder.token(std::move(fields[surface_col]), std::move(fields[tag_col]), line_no);
  }
  return builder.finish();
}

}  // namespace

Corpus read_corpus(std::istream& in, const LoadOptions& options) {
  return options.format == CorpusFormat::conll ? read_conll(in, options) : read_csv(in, options);
}

Corpus load_corpus(const std::filesystem::path& path, const LoadOptions& options) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read corpus '" + path.string() + "'");
  return read_corpus(in, options);
}

void write_conll(std::ostream& out, const Corpus& corpus) {
  for (const auto& s : corpus.sentences) {
    for (const auto& t : s.tokens) out << t.surface << '\t' << t.tag << '\n';
    out << '\n';
  }
}

void save_conll(const std::filesystem::path& path, const Corpus& corpus, std::string_view header) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write '" + path.string() + "'");
  if (!header.empty()) out << header << '\n';
  write_conll(out, corpus);
  if (!out) throw IoError("write failed for '" + path.string() + "'");
}

// ---------------------------------------------------------------------------
// Statistics

std::map<std::string, std::size_t> label_histogram(const Corpus& corpus, CountMode mode) {
  std::map<std::string, std::size_t> counts;
  for (const auto& s : corpus.sentences) {
    std::string_view previous = kOutside;
    for (const auto& t : s.tokens) {
      const auto type = tag_type(t.tag);
      const bool starts_span = type != previous || t.tag.starts_with("B-");
      if (mode == CountMode::tokens || type == kOutside || starts_span) ++counts[std::string(type)];
      previous = type;
    }
  }
  return counts;
}

std::string histogram_report(const std::map<std::string, std::size_t>& histogram, const Partition* partition) {
  std::vector<std::pair<std::string, std::size_t>> rows(histogram.begin(), histogram.end());
  std::stable_sort(rows.begin(), rows.end(), [](const auto& a, const auto& b) {
    if ((a.first == kOutside) != (b.first == kOutside)) return a.first == kOutside;
    return a.second > b.second;
  });
  std::size_t label_width = 5, count_width = 5;
  for (const auto& [label, count] : rows) {
    label_width = std::max(label_width, label.size());
    count_width = std::max(count_width, std::to_string(count).size());
  }
  std::ostringstream out;
  auto cell = [&](const std::string& label, const std::string& count) {
    out << "| " << std::left << std::setw(static_cast<int>(label_width)) << label << " | " << std::right
        << std::setw(static_cast<int>(count_width)) << count << " ";
  };
  cell("Label", "Count");
  cell("Label", "Count");
  out << "|\n";
  for (std::size_t i = 0; i < rows.size(); i += 2) {
    cell(rows[i].first, std::to_string(rows[i].second));
    if (i + 1 < rows.size()) {
      cell(rows[i + 1].first, std::to_string(rows[i + 1].second));
    } else {
      cell("", "");
    }
    out << "|\n";
  }
  std::size_t total = 0;
  for (const auto& [label, count] : rows) total += count;
  out << "total " << total << '\n';
  if (partition) {
    std::size_t strong = 0, weak = 0;
    for (const auto& [label, count] : rows) {
      if (partition->is_strong(label)) strong += count;
      if (partition->is_weak(label)) weak += count;
    }
    out << "strong " << strong << " weak " << weak;
    if (weak > 0) {
      out << " ratio " << std::fixed << std::setprecision(2) << static_cast<double>(strong) / static_cast<double>(weak);
    }
    out << '\n';
  }
  return out.str();
}

// ---------------------------------------------------------------------------
// Derived corpora

Corpus mask_labels(const Corpus& corpus, const Partition& partition, EntityGroup keep) {
  Corpus out;
  out.split_name = corpus.split_name;
  out.sentences.reserve(corpus.size());
  for (const auto& s : corpus.sentences) {
    Sentence masked = s;
    for (auto& t : masked.tokens) {
      const auto type = tag_type(t.tag);
      partition.check_covers(type);
      if (type != kOutside && !partition.contains(keep, type)) t.tag = std::string(kOutside);
      out.tags.add(t.tag);
    }
    out.sentences.push_back(std::move(masked));
  }
  return out;
}

Corpus detector_labels(const Corpus& corpus, const Partition& partition) {
  Corpus out = corpus;
  for (auto& s : out.sentences) {
    bool any_weak = false;
    for (const auto& t : s.tokens) {
      const auto type = tag_type(t.tag);
      partition.check_covers(type);
      any_weak = any_weak || partition.is_weak(type);
    }
    s.detector_label = any_weak ? 1 : 0;
  }
  return out;
}

std::pair<std::size_t, std::size_t> detector_counts(const Corpus& corpus) {
  std::size_t negatives = 0, positives = 0;
  for (const auto& s : corpus.sentences) {
    if (!s.detector_label) throw ContractError("sentence without a detector label");
    (*s.detector_label == 1 ? positives : negatives) += 1;
  }
  return {negatives, positives};
}

Corpus balanced_subsample(const Corpus& corpus, std::uint64_t seed) {
  const auto [negatives, positives] = detector_counts(corpus);
  if (positives == 0) throw DomainError("balanced_subsample: corpus has no positive sentences");
  std::vector<std::size_t> negative_ids;
  negative_ids.reserve(negatives);
  for (std::size_t i = 0; i < corpus.size(); ++i)
    if (*corpus.sentences[i].detector_label == 0) negative_ids.push_back(i);

  std::vector<bool> keep(corpus.size(), false);
  for (std::size_t i = 0; i < corpus.size(); ++i) keep[i] = *corpus.sentences[i].detector_label == 1;
  // Partial Fisher-Yates: the first `take` slots hold a uniform sample.
  Rng rng(seed);
  const std::size_t take = std::min(positives, negatives);
  for (std::size_t i = 0; i < take; ++i) {
    std::swap(negative_ids[i], negative_ids[i + rng.below(negative_ids.size() - i)]);
    keep[negative_ids[i]] = true;
  }

  Corpus out;
  out.split_name = corpus.split_name;
  out.tags = corpus.tags;
  for (std::size_t i = 0; i < corpus.size(); ++i)
    if (keep[i]) out.sentences.push_back(corpus.sentences[i]);
  return out;
}

// ---------------------------------------------------------------------------
// Vocabulary

Vocabulary::Vocabulary() {
  add("<unk>");
  add("<pad>");
}

void Vocabulary::add(std::string word) {
  if (index_.contains(word)) return;
  index_.emplace(word, words_.size());
  words_.push_back(std::move(word));
}

std::size_t Vocabulary::lookup(std::string_view token) const {
  auto it = index_.find(ascii_lower(token));
  return it == index_.end() || it->second == kPad ? kUnk : it->second;
}

bool Vocabulary::contains(std::string_view token) const {
  return lookup(token) != kUnk;
}

Vocabulary build_vocab(const Corpus& corpus, std::size_t min_freq) {
  if (min_freq == 0) throw DomainError("build_vocab: min_freq must be positive");
  std::map<std::string, std::size_t> freq;
  for (const auto& s : corpus.sentences)
    for (const auto& t : s.tokens) ++freq[ascii_lower(t.surface)];
  std::vector<std::pair<std::string, std::size_t>> kept;
  for (auto& [w, n] : freq)
    if (n >= min_freq) kept.emplace_back(w, n);
  std::stable_sort(kept.begin(), kept.end(), [](const auto& a, const auto& b) { return a.second > b.second; });
  Vocabulary vocab;
  for (auto& [w, n] : kept) vocab.add(w);
  return vocab;
}

}  // namespace seqtag
