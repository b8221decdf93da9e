#include <gtest/gtest.h>

#include <fstream>
#include <sstream>

#include "seqtag/corpus.hpp"
#include "seqtag/embeddings.hpp"
#include "seqtag/errors.hpp"
#include "support.hpp"

using namespace seqtag;

namespace {

EmbeddingMatrix parse(const std::string& text, std::size_t dim) {
  std::istringstream in(text);
  return read_pretrained(in, dim);
}

std::vector<double> vec(std::span<const double> s) { return {s.begin(), s.end()}; }

}  // namespace

TEST(Embeddings, ReservedRowsAreZero) {
  EmbeddingMatrix e(3);
  EXPECT_EQ(e.vocab_size(), 2u);
  EXPECT_EQ(vec(e.row(EmbeddingMatrix::kUnk)), (std::vector<double>{0, 0, 0}));
  EXPECT_EQ(vec(e.row(EmbeddingMatrix::kPad)), (std::vector<double>{0, 0, 0}));
  EXPECT_THROW(EmbeddingMatrix(0), DomainError);
}

TEST(Embeddings, ParsesTextFormat) {
  auto e = parse("# seqtag 0.1.0 config=1 seed=2\nParis 1 2.5 -3\n\nlondon\t0.5 0 1e-3\r\n", 3);
  EXPECT_EQ(e.vocab_size(), 4u);
  EXPECT_EQ(vec(e.lookup("paris")), (std::vector<double>{1, 2.5, -3}));
  EXPECT_EQ(vec(e.lookup("LONDON")), (std::vector<double>{0.5, 0, 1e-3}));
  EXPECT_EQ(vec(e.lookup("berlin")), (std::vector<double>{0, 0, 0}));
  EXPECT_FALSE(e.find("berlin"));
}

TEST(Embeddings, DuplicatesKeepTheLast) {
  auto e = parse("a 1 1\nA 2 2\nb 3 3\n", 2);
  EXPECT_EQ(e.vocab_size(), 4u);
  EXPECT_EQ(e.duplicates(), 1u);
  EXPECT_EQ(vec(e.lookup("a")), (std::vector<double>{2, 2}));
}

TEST(Embeddings, MalformedRowsReportLines) {
  EXPECT_THROW(parse("a 1\n", 2), ParseError);
  EXPECT_THROW(parse("a 1 2 3\n", 2), ParseError);
  EXPECT_THROW(parse("a 1 x\n", 2), ParseError);
  try {
    parse("a 1 2\nb 1 2x\n", 2);
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_NE(std::string(e.what()).find("2"), std::string::npos);
  }
  EmbeddingMatrix m(2);
  EXPECT_THROW(m.set("x", std::vector<double>{1.0}), DimensionError);
}

TEST(Embeddings, CacheRoundTrip) {
  seqtag::testing::TempDir dir("embeddings_cache");
  auto e = parse("alpha 0.1 -0.2 0.30000000000000004\nbeta 1e300 -1e-300 5\n", 3);
  {
    std::ofstream out(dir / "e.bin", std::ios::binary);
    write_cache(out, e);
  }
  auto back = load_embeddings(dir / "e.bin", 0);
  ASSERT_EQ(back.vocab_size(), e.vocab_size());
  for (std::size_t i = 0; i < e.vocab_size(); ++i) {
    EXPECT_EQ(back.token(i), e.token(i));
    EXPECT_EQ(vec(back.row(i)), vec(e.row(i)));
  }
  EXPECT_THROW(load_embeddings(dir / "e.bin", 4), DimensionError);
  {
    std::ofstream out(dir / "e.txt");
    write_pretrained(out, e);
  }
  auto text = load_embeddings(dir / "e.txt", 3);
  for (std::size_t i = 0; i < e.vocab_size(); ++i) EXPECT_EQ(vec(text.row(i)), vec(e.row(i)));
  EXPECT_THROW(load_embeddings(dir / "e.txt", 0), ConfigError);
  EXPECT_THROW(load_embeddings(dir / "none.txt", 3), IoError);
}

TEST(Embeddings, TruncatedCacheFails) {
  auto e = parse("alpha 1 2\n", 2);
  std::ostringstream out;
  write_cache(out, e);
  auto bytes = out.str();
  std::istringstream in(bytes.substr(0, bytes.size() - 3));
  EXPECT_THROW(read_cache(in), Error);
  std::istringstream bad("XXXX");
  EXPECT_THROW(read_cache(bad), ParseError);
}

TEST(Embeddings, SentenceMatrixWithPadding) {
  auto e = parse("the 1 2\ncat 3 4\n", 2);
  Sentence s{{{"The", "O"}, {"cat", "O"}, {"sat", "O"}}, {}};
  auto x = embed_sentence(e, s);
  EXPECT_EQ(x.shape(), (ad::Shape{3, 2}));
  EXPECT_EQ(vec(x.values()), (std::vector<double>{1, 2, 3, 4, 0, 0}));
  auto padded = embed_sentence(e, s, 5);
  EXPECT_EQ(padded.shape(), (ad::Shape{5, 2}));
  EXPECT_FALSE(padded.requires_grad());
}
