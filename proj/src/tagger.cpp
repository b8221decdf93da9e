#include "seqtag/tagger.hpp"

#include "seqtag/crf.hpp"
#include "seqtag/errors.hpp"
#include "seqtag/rng.hpp"

namespace seqtag {

namespace {

std::string join_tags(const std::vector<std::string>& tags) {
  std::string out;
  for (std::size_t i = 0; i < tags.size(); ++i) {
    if (i) out += '\t';
    out += tags[i];
  }
  return out;
}

TagSet split_tags(const std::string& joined) {
  TagSet set;
  std::size_t pos = 0;
  while (pos <= joined.size()) {
    const auto tab = std::min(joined.find('\t', pos), joined.size());
    set.add(joined.substr(pos, tab - pos));
    pos = tab + 1;
  }
  return set;
}

}  // namespace

Tagger::Tagger(TagSet tags, TaggerShape shape, std::uint64_t seed) : tags_(std::move(tags)), shape_(shape) {
  Rng rng(seed);
  encoder::add_bilstm(params_, "lstm", shape_.input_dim, shape_.hidden, rng);
  encoder::add_emission(params_, "emit", 2 * shape_.hidden, tags_.size(), rng);
  params_.add("crf.A", crf::make_transitions(tags_.size()));
  bind();
}

Tagger::Tagger(TagSet tags, TaggerShape shape, ad::ParameterSet params)
    : tags_(std::move(tags)), shape_(shape), params_(std::move(params)) {
  bind();
}

void Tagger::bind() {
  lstm_ = encoder::bilstm_from(params_, "lstm");
  emission_ = encoder::emission_from(params_, "emit");
  transitions_ = params_.get("crf.A");
  const std::size_t k = tags_.size();
  if (emission_.w_out.rows() != k || transitions_.rows() != k + 2 || transitions_.cols() != k + 2) {
    throw DimensionError("tagger parameters do not match a tag set of size " + std::to_string(k));
  }
}

Tagger Tagger::from_checkpoint(const Checkpoint& ckpt) {
  if (ckpt.get("kind") != "tagger") throw ConfigError("checkpoint is a '" + ckpt.get("kind") + "', not a tagger");
  TaggerShape shape;
  shape.input_dim = std::stoul(ckpt.get("input_dim"));
  shape.hidden = std::stoul(ckpt.get("hidden"));
  TagSet tags = split_tags(ckpt.get("tags"));
  if (join_tags(tags.tags()) != ckpt.get("tags")) throw ParseError("checkpoint tag list is not in canonical order");
  return Tagger(std::move(tags), shape, ckpt.parameters());
}

Checkpoint Tagger::to_checkpoint() const {
  Checkpoint ckpt;
  ckpt.set("kind", "tagger");
  ckpt.set("input_dim", std::to_string(shape_.input_dim));
  ckpt.set("hidden", std::to_string(shape_.hidden));
  ckpt.set("tags", join_tags(tags_.tags()));
  ckpt.add_parameters(params_);
  return ckpt;
}

ad::Tensor Tagger::emissions(ad::Graph& g, const ad::Tensor& inputs) const {
  return encoder::emission_scores(g, encoder::bilstm_encode(g, inputs, lstm_), emission_);
}

ad::Tensor Tagger::loss(ad::Graph& g, const ad::Tensor& inputs, std::span<const std::size_t> gold) const {
  return crf::nll(g, emissions(g, inputs), transitions_, gold);
}

Prediction Tagger::predict(const ad::Tensor& inputs) const {
  ad::Graph g(ad::Graph::Mode::inference);
  const auto p = emissions(g, inputs);
  const auto best = crf::viterbi(p, transitions_);
  Prediction out;
  out.marginals = crf::posterior_marginals(p, transitions_);
  out.tags.reserve(best.tags.size());
  out.confidence.reserve(best.tags.size());
  for (std::size_t t = 0; t < best.tags.size(); ++t) {
    out.tags.push_back(tags_.name(best.tags[t]));
    out.confidence.push_back(out.marginals(t, best.tags[t]));
  }
  return out;
}

std::vector<std::string> Tagger::decode(const ad::Tensor& inputs) const {
  ad::Graph g(ad::Graph::Mode::inference);
  const auto best = crf::viterbi(emissions(g, inputs), transitions_);
  std::vector<std::string> out;
  out.reserve(best.tags.size());
  for (auto y : best.tags) out.push_back(tags_.name(y));
  return out;
}

void Tagger::constrain() { crf::mask_sentinels(transitions_); }

}  // namespace seqtag
