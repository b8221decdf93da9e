#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace seqtag {

inline constexpr std::string_view kOutside = "O";

// Bare entity type of a possibly BIO-prefixed tag: "B-geo" -> "geo".
std::string_view tag_type(std::string_view tag);
bool is_outside(std::string_view tag);
std::string ascii_lower(std::string_view s);

struct Token {
  std::string surface;
  std::string tag;

  bool operator==(const Token&) const = default;
};

struct Sentence {
  std::vector<Token> tokens;
  std::optional<int> detector_label;

  std::size_t size() const { return tokens.size(); }
  bool operator==(const Sentence&) const = default;
};

enum class EntityGroup { strong, weak };

// Split of entity types into frequent (Strong) and rare (Weak) groups. Type
// names compare case-insensitively.
class Partition {
 public:
  Partition(std::vector<std::string> strong, std::vector<std::string> weak);

  // Geo, Tim, Org, Per, Gpe vs Art, Eve, Nat.
  static Partition standard();
  // Comma-separated type lists.
  static Partition parse(std::string_view strong, std::string_view weak);

  const std::vector<std::string>& strong() const { return strong_; }
  const std::vector<std::string>& weak() const { return weak_; }
  bool contains(EntityGroup group, std::string_view type) const;
  bool is_weak(std::string_view type) const { return contains(EntityGroup::weak, type); }
  bool is_strong(std::string_view type) const { return contains(EntityGroup::strong, type); }

  // Throws VocabularyError for a non-O type that belongs to neither group.
  void check_covers(std::string_view type) const;

 private:
  std::vector<std::string> strong_;
  std::vector<std::string> weak_;
};

// Ordered tag inventory. Index 0 is always "O"; remaining tags are kept in
// (type, tag) lexicographic order so the layout does not depend on the order
// tags were first seen. Two sentinel indices follow the real tags.
class TagSet {
 public:
  TagSet();
  template <typename Range>
  static TagSet from(const Range& tags) {
    TagSet set;
    for (const auto& t : tags) set.add(t);
    return set;
  }

  void add(std::string_view tag);
  std::size_t size() const { return tags_.size(); }
  std::size_t start_index() const { return tags_.size(); }
  std::size_t end_index() const { return tags_.size() + 1; }

  std::optional<std::size_t> find(std::string_view tag) const;
  std::size_t index(std::string_view tag) const;  // throws VocabularyError
  const std::string& name(std::size_t i) const { return tags_[i]; }
  const std::vector<std::string>& tags() const { return tags_; }
  // Distinct bare types, "O" first.
  std::vector<std::string> types() const;

  bool operator==(const TagSet& other) const { return tags_ == other.tags_; }

 private:
  std::vector<std::string> tags_;
};

struct Corpus {
  std::vector<Sentence> sentences;
  TagSet tags;
  std::string split_name;

  std::size_t size() const { return sentences.size(); }
  std::size_t token_count() const;
};

enum class CorpusFormat { conll, csv };

CorpusFormat parse_format(std::string_view name);

struct LoadOptions {
  CorpusFormat format = CorpusFormat::conll;
  // Column holding the tag in conll files; -1 selects the last column.
  int tag_column = 1;
  // Accept single-column conll rows, tagging them "O" (unlabeled input).
  bool allow_untagged = false;
  // When set, tags outside this inventory raise VocabularyError.
  const TagSet* frozen = nullptr;
  std::string split_name;
};

Corpus read_corpus(std::istream& in, const LoadOptions& options = {});
Corpus load_corpus(const std::filesystem::path& path, const LoadOptions& options = {});

// conll-2col: "surface<TAB>tag", blank line after each sentence.
void write_conll(std::ostream& out, const Corpus& corpus);
void save_conll(const std::filesystem::path& path, const Corpus& corpus, std::string_view header = {});

enum class CountMode {
  tokens,    // every token counts toward its type
  mentions,  // O tokens plus one count per entity span (B- tag or type change)
};

std::map<std::string, std::size_t> label_histogram(const Corpus& corpus, CountMode mode = CountMode::tokens);

// Two label/count column pairs, largest counts first with O leading.
std::string histogram_report(const std::map<std::string, std::size_t>& histogram,
                             const Partition* partition = nullptr);

// Relabels every entity token outside `keep` as O. Prefix-free tags are kept
// intact for retained types.
Corpus mask_labels(const Corpus& corpus, const Partition& partition, EntityGroup keep);

// Sets detector_label = 1 on sentences holding any Weak-type token, else 0.
Corpus detector_labels(const Corpus& corpus, const Partition& partition);

// Keeps all positives and a seeded uniform sample (without replacement) of
// as many negatives. Original sentence order is preserved.
Corpus balanced_subsample(const Corpus& corpus, std::uint64_t seed);

std::pair<std::size_t, std::size_t> detector_counts(const Corpus& corpus);

class Vocabulary {
 public:
  static constexpr std::size_t kUnk = 0;
  static constexpr std::size_t kPad = 1;

  Vocabulary();
  void add(std::string word);
  std::size_t lookup(std::string_view token) const;  // lowercases; unknown -> kUnk
  bool contains(std::string_view token) const;
  std::size_t size() const { return words_.size(); }
  const std::vector<std::string>& words() const { return words_; }

 private:
  std::vector<std::string> words_;
  std::unordered_map<std::string, std::size_t> index_;
};

// Lowercased tokens with frequency >= min_freq, most frequent first (ties in
// lexicographic order), after the reserved <unk> and <pad> entries.
Vocabulary build_vocab(const Corpus& corpus, std::size_t min_freq);

}  // namespace seqtag
