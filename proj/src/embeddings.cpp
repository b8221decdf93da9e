#include "seqtag/embeddings.hpp"

#include <charconv>
#include <fstream>
#include <istream>
#include <ostream>

#include "seqtag/binary_io.hpp"
#include "seqtag/corpus.hpp"
#include "seqtag/errors.hpp"
#include "seqtag/log.hpp"

namespace seqtag {

namespace {
constexpr char kCacheMagic[4] = {'E', 'M', 'B', '1'};
}

EmbeddingMatrix::EmbeddingMatrix(std::size_t dim) : dim_(dim) {
  if (dim == 0) throw DomainError("embedding dimension must be positive");
  tokens_ = {"<unk>", "<pad>"};
  values_.assign(2 * dim, 0.0);
}

bool EmbeddingMatrix::set(std::string_view token, std::span<const double> vector) {
  if (vector.size() != dim_) {
    throw DimensionError("embedding for '" + std::string(token) + "' has " + std::to_string(vector.size()) +
                         " values, expected " + std::to_string(dim_));
  }
  auto key = ascii_lower(token);
  if (auto it = index_.find(key); it != index_.end()) {
    std::copy(vector.begin(), vector.end(), values_.begin() + static_cast<std::ptrdiff_t>(it->second * dim_));
    return true;
  }
  index_.emplace(key, tokens_.size());
  tokens_.push_back(std::move(key));
  values_.insert(values_.end(), vector.begin(), vector.end());
  return false;
}

std::optional<std::size_t> EmbeddingMatrix::find(std::string_view token) const {
  auto it = index_.find(ascii_lower(token));
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

std::span<const double> EmbeddingMatrix::row(std::size_t index) const {
  return std::span<const double>(values_).subspan(index * dim_, dim_);
}

std::span<const double> EmbeddingMatrix::lookup(std::string_view token) const {
  return row(find(token).value_or(kUnk));
}

EmbeddingMatrix read_pretrained(std::istream& in, std::size_t dim) {
  EmbeddingMatrix emb(dim);
  std::string line;
  std::size_t line_no = 0;
  std::vector<double> vec(dim);
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (line_no == 1 && line.starts_with("# seqtag ")) continue;  // provenance header
    const char* p = line.data();
    const char* end = p + line.size();
    auto skip_space = [&] {
      while (p < end && (*p == ' ' || *p == '\t')) ++p;
    };
    skip_space();
    const char* word_begin = p;
    while (p < end && *p != ' ' && *p != '\t') ++p;
    std::string_view word(word_begin, static_cast<std::size_t>(p - word_begin));
    std::size_t fields = 1;
    for (std::size_t i = 0; i < dim; ++i) {
      skip_space();
      if (p >= end) break;
      auto [next, ec] = std::from_chars(p, end, vec[i]);
      if (ec != std::errc() || (next < end && *next != ' ' && *next != '\t')) {
        throw ParseError("malformed number in embedding row", line_no);
      }
      p = next;
      ++fields;
    }
    skip_space();
    if (fields != dim + 1 || p != end) {
      throw ParseError("expected " + std::to_string(dim + 1) + " fields in embedding row", line_no);
    }
    if (emb.set(word, vec)) {
      emb.note_duplicate();
      log_warning("duplicate embedding for '" + std::string(word) + "' at line " + std::to_string(line_no) +
                  "; keeping the last one");
    }
  }
  return emb;
}

EmbeddingMatrix load_pretrained(const std::filesystem::path& path, std::size_t dim) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot read embeddings '" + path.string() + "'");
  return read_pretrained(in, dim);
}

void write_pretrained(std::ostream& out, const EmbeddingMatrix& emb) {
  char buf[64];
  for (std::size_t i = 2; i < emb.vocab_size(); ++i) {
    out << emb.token(i);
    for (double v : emb.row(i)) {
      auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
      out << ' ' << std::string_view(buf, static_cast<std::size_t>(end - buf));
    }
    out << '\n';
  }
}

void write_cache(std::ostream& out, const EmbeddingMatrix& emb) {
  out.write(kCacheMagic, 4);
  binary::put_u64(out, emb.dim());
  binary::put_u64(out, emb.vocab_size() - 2);
  for (std::size_t i = 2; i < emb.vocab_size(); ++i) {
    binary::put_string(out, emb.token(i));
    for (double v : emb.row(i)) binary::put_f64(out, v);
  }
}

EmbeddingMatrix read_cache(std::istream& in) {
  char magic[4];
  binary::read_exact(in, magic, 4);
  if (!std::equal(magic, magic + 4, kCacheMagic)) throw ParseError("not an EMB1 embedding cache");
  const auto dim = binary::get_u64(in);
  const auto count = binary::get_u64(in);
  EmbeddingMatrix emb(dim);
  std::vector<double> vec(dim);
  for (std::uint64_t i = 0; i < count; ++i) {
    const auto token = binary::get_string(in);
    for (auto& v : vec) v = binary::get_f64(in);
    emb.set(token, vec);
  }
  return emb;
}

EmbeddingMatrix load_embeddings(const std::filesystem::path& path, std::size_t dim) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read embeddings '" + path.string() + "'");
  char magic[4] = {};
  in.read(magic, 4);
  const bool is_cache = in.gcount() == 4 && std::equal(magic, magic + 4, kCacheMagic);
  in.clear();
  in.seekg(0);
  if (is_cache) {
    auto emb = read_cache(in);
    if (dim != 0 && emb.dim() != dim) {
      throw DimensionError("embedding cache has dim " + std::to_string(emb.dim()) + ", expected " + std::to_string(dim));
    }
    return emb;
  }
  if (dim == 0) throw ConfigError("text embeddings need an explicit dimension");
  return read_pretrained(in, dim);
}

ad::Tensor embed_sentence(const EmbeddingMatrix& emb, const Sentence& sentence, std::size_t pad_to) {
  const std::size_t rows = std::max(sentence.size(), pad_to);
  std::vector<double> values;
  values.reserve(rows * emb.dim());
  for (const auto& t : sentence.tokens) {
    auto v = emb.lookup(t.surface);
    values.insert(values.end(), v.begin(), v.end());
  }
  for (std::size_t i = sentence.size(); i < rows; ++i) {
    auto v = emb.row(EmbeddingMatrix::kPad);
    values.insert(values.end(), v.begin(), v.end());
  }
  return ad::Tensor::matrix(rows, emb.dim(), std::move(values));
}

}  // namespace seqtag
