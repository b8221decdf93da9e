#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "seqtag/autodiff.hpp"

namespace seqtag {

struct Sentence;

// Frozen word vectors keyed by lowercased token. Rows 0 and 1 are the
// reserved <unk> and <pad> entries, both zero vectors.
class EmbeddingMatrix {
 public:
  static constexpr std::size_t kUnk = 0;
  static constexpr std::size_t kPad = 1;

  explicit EmbeddingMatrix(std::size_t dim);

  std::size_t dim() const { return dim_; }
  std::size_t vocab_size() const { return tokens_.size(); }

  // Inserts or overwrites; returns true when an existing row was replaced.
  bool set(std::string_view token, std::span<const double> vector);

  std::optional<std::size_t> find(std::string_view token) const;
  std::span<const double> row(std::size_t index) const;
  // Exact match on the lowercased token, else the <unk> row.
  std::span<const double> lookup(std::string_view token) const;
  const std::string& token(std::size_t index) const { return tokens_[index]; }

  std::size_t duplicates() const { return duplicates_; }
  void note_duplicate() { ++duplicates_; }

 private:
  std::size_t dim_;
  std::vector<std::string> tokens_;
  std::vector<double> values_;
  std::unordered_map<std::string, std::size_t> index_;
  std::size_t duplicates_ = 0;
};

// Whitespace separated "word v1 ... vdim" per line. Duplicate tokens keep the
// last vector and emit a warning. A leading "# seqtag " header line is skipped.
EmbeddingMatrix read_pretrained(std::istream& in, std::size_t dim);
EmbeddingMatrix load_pretrained(const std::filesystem::path& path, std::size_t dim);

void write_pretrained(std::ostream& out, const EmbeddingMatrix& emb);

// Binary cache: "EMB1", u64 dim, u64 entry count, then per entry a u32 length,
// the token bytes, and dim little-endian f64 values. Reserved rows are not
// stored.
void write_cache(std::ostream& out, const EmbeddingMatrix& emb);
EmbeddingMatrix read_cache(std::istream& in);

// Picks the text or binary reader from the file's leading bytes. `dim` is
// checked against binary caches and required for text files.
EmbeddingMatrix load_embeddings(const std::filesystem::path& path, std::size_t dim);

// T x dim constant input matrix for a sentence. `pad_to` appends <pad> rows.
ad::Tensor embed_sentence(const EmbeddingMatrix& emb, const Sentence& sentence, std::size_t pad_to = 0);

}  // namespace seqtag
