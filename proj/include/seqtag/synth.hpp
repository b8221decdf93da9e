#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "seqtag/config.hpp"
#include "seqtag/corpus.hpp"
#include "seqtag/embeddings.hpp"

namespace seqtag::synth {

struct TypeSpec {
  std::string name;         // "O" or a bare entity type
  double frequency = 0.0;   // share of all tokens
  std::size_t vocab = 0;    // lexicon size
};

struct SynthSpec {
  std::vector<TypeSpec> types;
  std::size_t min_length = 5;
  std::size_t max_length = 15;
  // Share of each lexicon drawn from a pool common to every type.
  double shared_fraction = 0.05;
  std::size_t train_sentences = 5000;
  std::size_t val_sentences = 1000;
  std::size_t test_sentences = 1000;
  std::size_t emb_dim = 100;
  // Spread of word vectors around their type centroid; centroids have unit
  // variance per coordinate.
  double emb_noise = 1.0;
  std::uint64_t seed = 1;

  // O and the five Strong types in their label-statistics proportions; the
  // three Weak types keep their relative proportions but are scaled so the
  // Strong:Weak token ratio equals `ratio`.
  static SynthSpec standard(double ratio = 50.0);
  // Keys: ratio, synth.{min_length,max_length,shared_fraction,train,val,test,
  // emb_noise}, emb_dim, seed, synth.freq.<type>, synth.vocab.<type>.
  static SynthSpec from_config(const Config& config);

  // Throws ConfigError on infeasible settings: negative frequencies, a sum
  // away from 1, an empty lexicon for a used type, or a bad length range.
  void validate() const;
};

struct SynthCorpus {
  Corpus train;
  Corpus val;
  Corpus test;
  EmbeddingMatrix embeddings{1};
};

// Token types are drawn independently per position from the spec
// frequencies. A token starts a mention (B-) when its type differs from the
// previous token's, else continues it (I-). Surfaces come from type lexicons.
SynthCorpus generate(const SynthSpec& spec);

// Writes train.conll, val.conll, test.conll and embeddings.txt under `dir`,
// each conll file prefixed with `header` when non-empty.
void write(const std::filesystem::path& dir, const SynthCorpus& corpus, const std::string& header = {});

}  // namespace seqtag::synth
