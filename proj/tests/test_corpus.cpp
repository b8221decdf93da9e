#include <gtest/gtest.h>

#include <set>
#include <sstream>

#include "seqtag/corpus.hpp"
#include "seqtag/errors.hpp"
#include "seqtag/rng.hpp"
#include "support.hpp"

using namespace seqtag;

namespace {

Corpus parse(const std::string& text, LoadOptions options = {}) {
  std::istringstream in(text);
  return read_corpus(in, options);
}

Sentence sentence(std::initializer_list<std::pair<const char*, const char*>> tokens) {
  Sentence s;
  for (auto [w, t] : tokens) s.tokens.push_back({w, t});
  return s;
}

Corpus corpus_of(std::vector<Sentence> sentences) {
  Corpus c;
  for (auto& s : sentences) {
    for (auto& t : s.tokens) c.tags.add(t.tag);
    c.sentences.push_back(std::move(s));
  }
  return c;
}

}  // namespace

TEST(Tags, TypeStripsPrefix) {
  EXPECT_EQ(tag_type("B-geo"), "geo");
  EXPECT_EQ(tag_type("I-art"), "art");
  EXPECT_EQ(tag_type("geo"), "geo");
  EXPECT_EQ(tag_type("O"), "O");
  EXPECT_TRUE(is_outside("O"));
  EXPECT_FALSE(is_outside("B-O-ish"));
}

TEST(Tags, TagSetIsOrderIndependent) {
  auto a = TagSet::from(std::vector<std::string>{"I-per", "B-geo", "O", "B-per"});
  auto b = TagSet::from(std::vector<std::string>{"B-per", "B-geo", "I-per"});
  EXPECT_EQ(a, b);
  EXPECT_EQ(a.name(0), "O");
  EXPECT_EQ(a.tags(), (std::vector<std::string>{"O", "B-geo", "B-per", "I-per"}));
  EXPECT_EQ(a.start_index(), 4u);
  EXPECT_EQ(a.end_index(), 5u);
  EXPECT_EQ(a.types(), (std::vector<std::string>{"O", "geo", "per"}));
  EXPECT_THROW(a.index("B-art"), VocabularyError);
}

TEST(Partition, StandardGroups) {
  auto p = Partition::standard();
  for (auto t : {"geo", "tim", "org", "per", "gpe"}) EXPECT_TRUE(p.is_strong(t));
  for (auto t : {"art", "eve", "nat"}) EXPECT_TRUE(p.is_weak(t));
  EXPECT_TRUE(p.is_weak("ART"));
  EXPECT_THROW(p.check_covers("xyz"), VocabularyError);
  EXPECT_NO_THROW(p.check_covers("O"));
}

TEST(Partition, RejectsOverlapAndOutside) {
  EXPECT_THROW(Partition::parse("geo,art", "art"), ConfigError);
  EXPECT_THROW(Partition::parse("O", "art"), ConfigError);
  auto p = Partition::parse(" geo , per ", "art,");
  EXPECT_EQ(p.strong(), (std::vector<std::string>{"geo", "per"}));
  EXPECT_EQ(p.weak(), (std::vector<std::string>{"art"}));
}

TEST(Conll, ParsesSentencesAndBoundaries) {
  auto c = parse("Paris\tB-geo\nis\tO\n\n\n\nHe\tO\r\nwon\tO\n");
  ASSERT_EQ(c.size(), 2u);
  EXPECT_EQ(c.sentences[0].tokens[0], (Token{"Paris", "B-geo"}));
  EXPECT_EQ(c.sentences[1].size(), 2u);
  EXPECT_EQ(c.token_count(), 4u);
  EXPECT_TRUE(c.tags.find("B-geo"));
}

TEST(Conll, SpaceSeparatedAndTagColumn) {
  auto c = parse("Paris NNP B-geo\n", {.tag_column = -1});
  EXPECT_EQ(c.sentences[0].tokens[0].tag, "B-geo");
  auto d = parse("Paris\tNNP\tB-geo\n", {.tag_column = 1});
  EXPECT_EQ(d.sentences[0].tokens[0].tag, "NNP");
}

TEST(Conll, SkipsHeaderLine) {
  auto c = parse("# seqtag 0.1.0 config=abc seed=1\nx\tO\n");
  ASSERT_EQ(c.size(), 1u);
  EXPECT_EQ(c.sentences[0].tokens[0].surface, "x");
  // A token that happens to be '#' is still data.
  auto d = parse("#\tO\n");
  EXPECT_EQ(d.sentences[0].tokens[0].surface, "#");
}

TEST(Conll, ErrorsCarryLineNumbers) {
  try {
    parse("a\tO\nlonely\n");
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_NE(std::string(e.what()).find("2"), std::string::npos);
  }
  EXPECT_THROW(parse("a\tO\n", {.tag_column = 4}), ParseError);
}

TEST(Conll, UntaggedInputAndFrozenTags) {
  auto c = parse("hello\nworld\n", {.allow_untagged = true});
  EXPECT_EQ(c.sentences[0].tokens[1], (Token{"world", "O"}));
  auto frozen = TagSet::from(std::vector<std::string>{"B-geo"});
  EXPECT_NO_THROW(parse("a\tB-geo\n", {.frozen = &frozen}));
  EXPECT_THROW(parse("a\tB-art\n", {.frozen = &frozen}), VocabularyError);
}

TEST(Conll, RoundTripIsByteIdentical) {
  Rng rng(5);
  std::vector<Sentence> sentences;
  const std::vector<std::string> tags{"O", "B-geo", "I-geo", "B-art", "I-per"};
  for (int s = 0; s < 50; ++s) {
    Sentence sent;
    const auto n = 1 + rng.below(12);
    for (std::size_t i = 0; i < n; ++i)
      sent.tokens.push_back({"w" + std::to_string(rng.below(1000)) + "'s,\"q\"", tags[rng.below(tags.size())]});
    sentences.push_back(std::move(sent));
  }
  auto original = corpus_of(sentences);
  std::ostringstream first;
  write_conll(first, original);
  auto reread = parse(first.str());
  EXPECT_EQ(reread.sentences, original.sentences);
  EXPECT_EQ(reread.tags, original.tags);
  std::ostringstream second;
  write_conll(second, reread);
  EXPECT_EQ(first.str(), second.str());
}

TEST(Conll, SaveWithHeaderRoundTrips) {
  seqtag::testing::TempDir dir("corpus_save");
  auto c = corpus_of({sentence({{"a", "B-geo"}, {"b", "O"}})});
  save_conll(dir / "x.conll", c, "# seqtag 0.1.0 config=0 seed=1");
  auto back = load_corpus(dir / "x.conll");
  EXPECT_EQ(back.sentences, c.sentences);
  EXPECT_THROW(load_corpus(dir / "missing.conll"), IoError);
}

TEST(Csv, KaggleStyleColumnsAndContinuation) {
  const std::string text =
      "Sentence #,Word,POS,Tag\n"
      "Sentence: 1,Thousands,NNS,O\n"
      ",of,IN,O\n"
      ",\"London, UK\",NNP,B-geo\n"
      "Sentence: 2,\"say \"\"hi\"\"\",VB,O\n";
  auto c = parse(text, {.format = CorpusFormat::csv});
  ASSERT_EQ(c.size(), 2u);
  EXPECT_EQ(c.sentences[0].size(), 3u);
  EXPECT_EQ(c.sentences[0].tokens[2], (Token{"London, UK", "B-geo"}));
  EXPECT_EQ(c.sentences[1].tokens[0].surface, "say \"hi\"");
}

TEST(Csv, PlainHeaderAndErrors) {
  auto c = parse("sentence_id,surface,tag\n1,a,O\n1,b,B-art\n2,c,O\n", {.format = CorpusFormat::csv});
  EXPECT_EQ(c.size(), 2u);
  EXPECT_THROW(parse("id,surface,tag\n1,a,O\n", {.format = CorpusFormat::csv}), ParseError);
  EXPECT_THROW(parse("sentence_id,surface,tag\n,a,O\n", {.format = CorpusFormat::csv}), ParseError);
  EXPECT_THROW(parse("sentence_id,surface,tag\n1,\"a,O\n", {.format = CorpusFormat::csv}), ParseError);
  EXPECT_THROW(parse_format("xml"), ConfigError);
}

TEST(Histogram, TokensAndMentions) {
  auto c = corpus_of({sentence({{"a", "B-geo"}, {"b", "I-geo"}, {"c", "O"}, {"d", "B-geo"}, {"e", "B-geo"}}),
                      sentence({{"f", "I-per"}, {"g", "I-per"}, {"h", "I-art"}})});
  auto tokens = label_histogram(c, CountMode::tokens);
  EXPECT_EQ(tokens, (std::map<std::string, std::size_t>{{"O", 1}, {"geo", 4}, {"per", 2}, {"art", 1}}));
  auto mentions = label_histogram(c, CountMode::mentions);
  EXPECT_EQ(mentions, (std::map<std::string, std::size_t>{{"O", 1}, {"geo", 3}, {"per", 1}, {"art", 1}}));
}

TEST(Histogram, ReportOrdersByCountWithOFirst) {
  std::map<std::string, std::size_t> h{{"O", 5}, {"geo", 40}, {"art", 2}};
  auto p = Partition::standard();
  auto report = histogram_report(h, &p);
  const auto o = report.find("| O"), geo = report.find("geo"), art = report.find("art");
  EXPECT_LT(o, geo);
  EXPECT_LT(geo, art);
  EXPECT_NE(report.find("total 47"), std::string::npos);
  EXPECT_NE(report.find("strong 40 weak 2 ratio 20.00"), std::string::npos);
}

TEST(Masking, KeepsOnlyRequestedGroup) {
  auto c = corpus_of({sentence({{"a", "B-geo"}, {"b", "B-art"}, {"c", "O"}, {"d", "I-nat"}})});
  auto p = Partition::standard();
  auto strong = mask_labels(c, p, EntityGroup::strong);
  auto weak = mask_labels(c, p, EntityGroup::weak);
  std::vector<std::string> s_tags, w_tags;
  for (auto& t : strong.sentences[0].tokens) s_tags.push_back(t.tag);
  for (auto& t : weak.sentences[0].tokens) w_tags.push_back(t.tag);
  EXPECT_EQ(s_tags, (std::vector<std::string>{"B-geo", "O", "O", "O"}));
  EXPECT_EQ(w_tags, (std::vector<std::string>{"O", "B-art", "O", "I-nat"}));
  EXPECT_EQ(strong.tags.tags(), (std::vector<std::string>{"O", "B-geo"}));
}

TEST(Masking, IsIdempotent) {
  Rng rng(9);
  const std::vector<std::string> tags{"O", "B-geo", "I-geo", "B-art", "I-eve", "B-tim", "nat"};
  std::vector<Sentence> sentences(30);
  for (auto& s : sentences)
    for (std::size_t i = 0; i < 8; ++i) s.tokens.push_back({"x", tags[rng.below(tags.size())]});
  auto c = corpus_of(sentences);
  auto p = Partition::standard();
  for (auto g : {EntityGroup::strong, EntityGroup::weak}) {
    auto once = mask_labels(c, p, g);
    auto twice = mask_labels(once, p, g);
    EXPECT_EQ(once.sentences, twice.sentences);
    EXPECT_EQ(once.tags, twice.tags);
  }
  EXPECT_THROW(mask_labels(corpus_of({sentence({{"a", "B-xyz"}})}), p, EntityGroup::strong), VocabularyError);
}

TEST(Detector, LabelsAndCounts) {
  auto c = corpus_of({sentence({{"a", "B-geo"}}), sentence({{"a", "O"}, {"b", "B-eve"}}), sentence({{"c", "O"}})});
  auto labeled = detector_labels(c, Partition::standard());
  EXPECT_EQ(labeled.sentences[0].detector_label, 0);
  EXPECT_EQ(labeled.sentences[1].detector_label, 1);
  EXPECT_EQ(labeled.sentences[2].detector_label, 0);
  EXPECT_EQ(detector_counts(labeled), (std::pair<std::size_t, std::size_t>{2, 1}));
  EXPECT_THROW(detector_counts(c), ContractError);
}

TEST(Detector, BalancedSubsample) {
  Corpus c;
  for (int i = 0; i < 100; ++i) {
    Sentence s = sentence({{"w", "O"}});
    s.tokens[0].surface = std::to_string(i);
    s.detector_label = i % 10 == 0 ? 1 : 0;
    c.sentences.push_back(s);
  }
  auto a = balanced_subsample(c, 3);
  auto b = balanced_subsample(c, 3);
  EXPECT_EQ(a.sentences, b.sentences);
  EXPECT_EQ(detector_counts(a), (std::pair<std::size_t, std::size_t>{10, 10}));
  // Original order preserved.
  for (std::size_t i = 1; i < a.size(); ++i)
    EXPECT_LT(std::stoi(a.sentences[i - 1].tokens[0].surface), std::stoi(a.sentences[i].tokens[0].surface));
  // Different seeds pick different negatives, and over many seeds every negative is reachable.
  std::set<std::string> seen;
  for (std::uint64_t seed = 0; seed < 200; ++seed)
    for (auto& s : balanced_subsample(c, seed).sentences)
      if (*s.detector_label == 0) seen.insert(s.tokens[0].surface);
  EXPECT_EQ(seen.size(), 90u);
  for (auto& s : c.sentences) s.detector_label = 0;
  EXPECT_THROW(balanced_subsample(c, 1), DomainError);
}

TEST(Vocab, OrderMatchesRecount) {
  Rng rng(11);
  std::vector<Sentence> sentences(40);
  const std::vector<std::string> words{"The", "the", "cat", "Cat", "dog", "a", "b", "c", "zebra"};
  for (auto& s : sentences)
    for (std::size_t i = 0; i < 6; ++i) s.tokens.push_back({words[rng.below(words.size())], "O"});
  auto c = corpus_of(sentences);
  for (std::size_t min_freq : {1u, 5u, 20u, 1000u}) {
    auto v = build_vocab(c, min_freq);
    std::map<std::string, std::size_t> freq;
    for (auto& s : c.sentences)
      for (auto& t : s.tokens) ++freq[ascii_lower(t.surface)];
    std::vector<std::pair<std::size_t, std::string>> expected;
    for (auto& [w, n] : freq)
      if (n >= min_freq) expected.emplace_back(n, w);
    std::sort(expected.begin(), expected.end(), [](auto& x, auto& y) {
      return x.first != y.first ? x.first > y.first : x.second < y.second;
    });
    ASSERT_EQ(v.size(), expected.size() + 2);
    EXPECT_EQ(v.words()[0], "<unk>");
    EXPECT_EQ(v.words()[1], "<pad>");
    for (std::size_t i = 0; i < expected.size(); ++i) EXPECT_EQ(v.words()[i + 2], expected[i].second);
  }
  auto v = build_vocab(c, 1);
  EXPECT_EQ(v.lookup("CAT"), v.lookup("cat"));
  EXPECT_EQ(v.lookup("unseen"), Vocabulary::kUnk);
  EXPECT_EQ(v.lookup("<pad>"), Vocabulary::kUnk);
  EXPECT_THROW(build_vocab(c, 0), DomainError);
}
