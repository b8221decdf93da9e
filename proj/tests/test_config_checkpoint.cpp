#include <gtest/gtest.h>

#include <sstream>

#include "seqtag/checkpoint.hpp"
#include "seqtag/config.hpp"
#include "seqtag/errors.hpp"
#include "support.hpp"

using namespace seqtag;

namespace {

Config parse(const std::string& text) {
  std::istringstream in(text);
  return Config::parse(in);
}

}  // namespace

TEST(Config, ParsesKeyValueLines) {
  auto c = parse("# comment\nlr = 0.05  # trailing\n\n  seed=3\nwidths = 2, 3,4\nflag = yes\n");
  EXPECT_EQ(c.get("lr"), "0.05");
  EXPECT_EQ(c.get_double("lr", 0), 0.05);
  EXPECT_EQ(c.get_u64("seed", 0), 3u);
  EXPECT_EQ(c.get_sizes("widths", {}), (std::vector<std::size_t>{2, 3, 4}));
  EXPECT_TRUE(c.get_bool("flag", false));
  EXPECT_EQ(c.get_size("missing", 7), 7u);
  EXPECT_EQ(c.get("missing", "x"), "x");
  EXPECT_THROW(c.require("missing"), ConfigError);
  EXPECT_THROW(parse("no equals sign\n"), ParseError);
  EXPECT_THROW(parse(" = value\n"), ParseError);
}

TEST(Config, BadValuesAreConfigErrors) {
  auto c = parse("n = 12x\nb = maybe\nneg = -1\n");
  EXPECT_THROW(c.get_size("n", 0), ConfigError);
  EXPECT_THROW(c.get_bool("b", false), ConfigError);
  EXPECT_THROW(c.get_size("neg", 0), ConfigError);
  EXPECT_EQ(c.get_int("neg", 0), -1);
  EXPECT_THROW(Config::load("/nonexistent/config.txt"), ConfigError);
}

TEST(Config, MergePrefersOverrides) {
  auto base = parse("a = 1\nb = 2\n");
  auto over = parse("b = 3\nc = 4\n");
  base.merge(over);
  EXPECT_EQ(base.get("a"), "1");
  EXPECT_EQ(base.get("b"), "3");
  EXPECT_EQ(base.get("c"), "4");
}

TEST(Config, HashIsFnv1aOverSortedEntries) {
  EXPECT_EQ(Config{}.hash(), "cbf29ce484222325");
  auto c = parse("seed = 3\nlr = 0.05\n");
  EXPECT_EQ(c.hash(), "a510230abd46a938");
  // Output destinations do not affect the hash.
  c.set("out", "/tmp/x");
  c.set("log", "/tmp/y");
  EXPECT_EQ(c.hash(), "a510230abd46a938");
  c.set("lr", "0.1");
  EXPECT_NE(c.hash(), "a510230abd46a938");
  EXPECT_EQ(output_header(parse("seed = 3\nlr = 0.05\n"), 3), "# seqtag 0.1.0 config=a510230abd46a938 seed=3");
}

TEST(Checkpoint, RoundTripIsBitExact) {
  Rng rng(1);
  Checkpoint ck;
  ck.set("kind", "tagger");
  ck.set("tags", "O,B-geo");
  ad::ParameterSet params;
  params.add("a", seqtag::testing::random_tensor(rng, {3, 2}, -1e300, 1e300));
  params.add("b", ad::Tensor::column({0.1, -0.0, 5e-324}));
  ck.add_parameters(params);
  std::ostringstream out;
  write_checkpoint(out, ck);
  std::istringstream in(out.str());
  auto back = read_checkpoint(in);
  EXPECT_EQ(back.get("kind"), "tagger");
  EXPECT_EQ(back.get("tags"), "O,B-geo");
  EXPECT_THROW(back.get("absent"), ParseError);
  auto restored = back.parameters();
  ASSERT_TRUE(restored.contains("a"));
  const auto& a0 = params.get("a").values();
  const auto& a1 = restored.get("a").values();
  ASSERT_EQ(a1.size(), a0.size());
  for (std::size_t i = 0; i < a0.size(); ++i) EXPECT_EQ(a0[i], a1[i]);
  EXPECT_TRUE(std::signbit(restored.get("b").values()[1]));
  std::ostringstream again;
  write_checkpoint(again, back);
  EXPECT_EQ(again.str(), out.str());
  EXPECT_EQ(out.str().substr(0, 4), "SEQT");
}

TEST(Checkpoint, CorruptInputsFail) {
  std::istringstream wrong("NOPE....");
  EXPECT_THROW(read_checkpoint(wrong), ParseError);
  Checkpoint ck;
  ck.set("k", "v");
  std::ostringstream out;
  write_checkpoint(out, ck);
  auto bytes = out.str();
  bytes[4] = 9;  // version
  std::istringstream bad_version(bytes);
  EXPECT_THROW(read_checkpoint(bad_version), ParseError);
  std::istringstream truncated(out.str().substr(0, out.str().size() - 2));
  EXPECT_THROW(read_checkpoint(truncated), Error);
  EXPECT_THROW(load_checkpoint("/nonexistent/model.ckpt"), ConfigError);
}

TEST(Checkpoint, SaveCreatesParentDirectories) {
  seqtag::testing::TempDir dir("checkpoint_save");
  Checkpoint ck;
  ck.set("kind", "detector");
  save_checkpoint(dir / "nested/deeper/m.ckpt", ck);
  EXPECT_EQ(load_checkpoint(dir / "nested/deeper/m.ckpt").get("kind"), "detector");
}
