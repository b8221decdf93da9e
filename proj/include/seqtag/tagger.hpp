#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "seqtag/autodiff.hpp"
#include "seqtag/checkpoint.hpp"
#include "seqtag/corpus.hpp"
#include "seqtag/encoder.hpp"

namespace seqtag {

// Decoded tags for one sentence with the CRF posterior of every tag.
struct Prediction {
  std::vector<std::string> tags;
  std::vector<double> confidence;  // posterior of the decoded tag at each position
  ad::Tensor marginals;            // T x K, rows sum to 1
};

struct TaggerShape {
  std::size_t input_dim = 100;
  std::size_t hidden = 100;
};

// Bi-LSTM encoder, per-position affine emission layer and linear-chain CRF.
class Tagger {
 public:
  Tagger(TagSet tags, TaggerShape shape, std::uint64_t seed);
  static Tagger from_checkpoint(const Checkpoint& ckpt);
  Checkpoint to_checkpoint() const;
  Tagger clone() const { return from_checkpoint(to_checkpoint()); }

  const TagSet& tags() const { return tags_; }
  const TaggerShape& shape() const { return shape_; }
  ad::ParameterSet& params() { return params_; }
  const ad::ParameterSet& params() const { return params_; }
  const ad::Tensor& transitions() const { return transitions_; }

  ad::Tensor emissions(ad::Graph& g, const ad::Tensor& inputs) const;
  ad::Tensor loss(ad::Graph& g, const ad::Tensor& inputs, std::span<const std::size_t> gold) const;
  Prediction predict(const ad::Tensor& inputs) const;
  // Viterbi tags only, without posteriors.
  std::vector<std::string> decode(const ad::Tensor& inputs) const;

  // Re-imposes the forbidden sentinel transitions after an update.
  void constrain();

 private:
  Tagger(TagSet tags, TaggerShape shape, ad::ParameterSet params);
  void bind();

  TagSet tags_;
  TaggerShape shape_;
  ad::ParameterSet params_;
  encoder::BiLstmWeights lstm_;
  encoder::EmissionWeights emission_;
  ad::Tensor transitions_;
};

}  // namespace seqtag
