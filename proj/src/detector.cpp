#include "seqtag/detector.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <ostream>

#include "seqtag/corpus.hpp"
#include "seqtag/embeddings.hpp"
#include "seqtag/errors.hpp"
#include "seqtag/log.hpp"
#include "seqtag/rng.hpp"

namespace seqtag::detector {

namespace {

std::atomic<std::size_t> g_clamps{0};
constexpr double kMinScore = 1e-12;

std::string join_sizes(const std::vector<std::size_t>& v) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) out += ',';
    out += std::to_string(v[i]);
  }
  return out;
}

std::vector<std::size_t> split_sizes(const std::string& s) {
  std::vector<std::size_t> out;
  std::size_t pos = 0;
  while (pos < s.size()) {
    const auto comma = std::min(s.find(',', pos), s.size());
    out.push_back(std::stoul(s.substr(pos, comma - pos)));
    pos = comma + 1;
  }
  return out;
}

std::string conv_name(std::size_t width) { return "conv" + std::to_string(width); }

}  // namespace

ClassWeights ClassWeights::normalized(double w0, double w1) {
  if (!(w0 > 0.0) || !(w1 > 0.0)) throw DomainError("class weights must be positive");
  const double total = w0 + w1;
  return ClassWeights{w0 / total, w1 / total};
}

ClassWeights compute_class_weights(std::size_t n0, std::size_t n1) {
  if (n0 == 0 || n1 == 0) {
    throw DomainError("class weights need both classes present (n0=" + std::to_string(n0) +
                      ", n1=" + std::to_string(n1) + ")");
  }
  return ClassWeights::normalized(static_cast<double>(n1), static_cast<double>(n0));
}

ClassWeights compute_class_weights(const Corpus& corpus) {
  const auto [n0, n1] = detector_counts(corpus);
  return compute_class_weights(n0, n1);
}

double weighted_bce(double s0, double s1, int target, const ClassWeights& weights) {
  if (target != 0 && target != 1) throw DomainError("detector target must be 0 or 1");
  double s = target == 0 ? s0 : s1;
  if (s < kMinScore) {
    ++g_clamps;
    s = kMinScore;
  }
  return -(target == 0 ? weights.w0 : weights.w1) * std::log(s);
}

std::size_t clamp_count() { return g_clamps.load(); }

ad::Tensor weighted_bce_loss(ad::Graph& g, const ad::Tensor& logits, int target, const ClassWeights& weights) {
  if (target != 0 && target != 1) throw DomainError("detector target must be 0 or 1");
  auto log_scores = ad::log_softmax(g, logits);
  const double w = target == 0 ? weights.w0 : weights.w1;
  return ad::scale(g, ad::pick(g, log_scores, static_cast<std::size_t>(target)), -w);
}

// ---------------------------------------------------------------------------
// Detector

Detector::Detector(DetectorShape shape, std::uint64_t seed) : shape_(std::move(shape)) {
  if (shape_.widths.empty() || shape_.filters == 0 || shape_.hidden == 0) {
    throw ConfigError("detector needs at least one conv width, filters > 0 and hidden > 0");
  }
  Rng rng(seed);
  encoder::add_bilstm(params_, "lstm", shape_.input_dim, shape_.hidden, rng);
  const std::size_t channels = 2 * shape_.hidden;
  for (auto w : shape_.widths) {
    if (w == 0) throw ConfigError("conv width must be positive");
    auto filters = ad::Tensor::zeros({shape_.filters, w * channels});
    ad::init_uniform(filters, rng, w * channels, shape_.filters);
    params_.add(conv_name(w) + ".w", filters);
    params_.add(conv_name(w) + ".b", ad::Tensor::zeros({shape_.filters, 1}));
  }
  const std::size_t features = shape_.filters * shape_.widths.size();
  auto out_w = ad::Tensor::zeros({2, features});
  ad::init_uniform(out_w, rng, features, 2);
  params_.add("out.w", out_w);
  params_.add("out.b", ad::Tensor::zeros({2, 1}));
  bind();
}

Detector::Detector(DetectorShape shape, ad::ParameterSet params)
    : shape_(std::move(shape)), params_(std::move(params)) {
  bind();
}

void Detector::bind() {
  lstm_ = encoder::bilstm_from(params_, "lstm");
  convs_.clear();
  for (auto w : shape_.widths) convs_.emplace_back(params_.get(conv_name(w) + ".w"), params_.get(conv_name(w) + ".b"));
  out_w_ = params_.get("out.w");
  out_b_ = params_.get("out.b");
  if (out_w_.rows() != 2 || out_w_.cols() != shape_.filters * shape_.widths.size()) {
    throw DimensionError("detector output layer must be 2 x " + std::to_string(shape_.filters * shape_.widths.size()));
  }
}

Detector Detector::from_checkpoint(const Checkpoint& ckpt) {
  if (ckpt.get("kind") != "detector") throw ConfigError("checkpoint is a '" + ckpt.get("kind") + "', not a detector");
  DetectorShape shape;
  shape.input_dim = std::stoul(ckpt.get("input_dim"));
  shape.hidden = std::stoul(ckpt.get("hidden"));
  shape.widths = split_sizes(ckpt.get("conv_widths"));
  shape.filters = std::stoul(ckpt.get("conv_filters"));
  return Detector(std::move(shape), ckpt.parameters());
}

Checkpoint Detector::to_checkpoint() const {
  Checkpoint ckpt;
  ckpt.set("kind", "detector");
  ckpt.set("input_dim", std::to_string(shape_.input_dim));
  ckpt.set("hidden", std::to_string(shape_.hidden));
  ckpt.set("conv_widths", join_sizes(shape_.widths));
  ckpt.set("conv_filters", std::to_string(shape_.filters));
  ckpt.add_parameters(params_);
  return ckpt;
}

ad::Tensor Detector::logits(ad::Graph& g, const ad::Tensor& inputs, std::size_t length) const {
  if (length == 0) throw DomainError("detector input sentence is empty");
  if (length > inputs.rows()) throw ContractError("detector length exceeds input rows");
  const ad::Tensor real = length == inputs.rows() ? inputs : ad::slice_rows(g, inputs, 0, length);
  auto hidden = encoder::bilstm_encode(g, real, lstm_);
  std::vector<ad::Tensor> pooled;
  pooled.reserve(convs_.size());
  for (std::size_t i = 0; i < convs_.size(); ++i) {
    // Widths longer than the sentence shrink to its length.
    const std::size_t width = std::min(shape_.widths[i], length);
    auto maps = ad::relu(g, ad::conv1d(g, hidden, convs_[i].first, convs_[i].second, width));
    pooled.push_back(ad::max_over_rows(g, maps));
  }
  auto features = ad::concat_rows(g, pooled);
  return ad::add(g, ad::matmul(g, out_w_, features), out_b_);
}

std::pair<double, double> Detector::scores(const ad::Tensor& inputs, std::size_t length) const {
  ad::Graph g(ad::Graph::Mode::inference);
  const ad::Tensor out = logits(g, inputs, length);
  const auto z = out.values();
  const double m = std::max(z[0], z[1]);
  const double e0 = std::exp(z[0] - m), e1 = std::exp(z[1] - m);
  return {e0 / (e0 + e1), e1 / (e0 + e1)};
}

ad::Tensor Detector::loss(ad::Graph& g, const ad::Tensor& inputs, int target, const ClassWeights& weights) const {
  return weighted_bce_loss(g, logits(g, inputs), target, weights);
}

// ---------------------------------------------------------------------------
// Evaluation and training

ClassAccuracy class_accuracy(std::span<const int> predicted, std::span<const int> gold) {
  if (predicted.size() != gold.size()) throw ContractError("prediction and gold label counts differ");
  std::size_t total[2] = {0, 0}, correct[2] = {0, 0};
  for (std::size_t i = 0; i < gold.size(); ++i) {
    const int c = gold[i];
    if (c != 0 && c != 1) throw DomainError("detector label must be 0 or 1");
    ++total[c];
    if (predicted[i] == c) ++correct[c];
  }
  ClassAccuracy acc;
  if (total[0]) acc.acc0 = static_cast<double>(correct[0]) / static_cast<double>(total[0]);
  if (total[1]) acc.acc1 = static_cast<double>(correct[1]) / static_cast<double>(total[1]);
  return acc;
}

ClassAccuracy detector_class_accuracy(const Detector& model, const Corpus& corpus, const EmbeddingMatrix& emb,
                                      double threshold) {
  std::vector<int> predicted, gold;
  predicted.reserve(corpus.size());
  gold.reserve(corpus.size());
  for (const auto& s : corpus.sentences) {
    if (!s.detector_label) throw ContractError("sentence without a detector label");
    const auto [s0, s1] = model.scores(embed_sentence(emb, s));
    predicted.push_back(s1 >= threshold ? 1 : 0);
    gold.push_back(*s.detector_label);
  }
  return class_accuracy(predicted, gold);
}

namespace {

bool better(const EpochRecord& a, const EpochRecord& b) {
  const double a1 = a.acc1.value_or(-1.0), b1 = b.acc1.value_or(-1.0);
  if (a1 != b1) return a1 > b1;
  return a.acc0.value_or(-1.0) > b.acc0.value_or(-1.0);
}

}  // namespace

TrainResult train(const Corpus& train_corpus, const Corpus& val, const EmbeddingMatrix& emb, const TrainOptions& options) {
  if (options.shape.input_dim != emb.dim()) {
    throw ConfigError("detector input_dim " + std::to_string(options.shape.input_dim) + " differs from embedding dim " +
                      std::to_string(emb.dim()));
  }
  const Corpus data = options.balanced ? balanced_subsample(train_corpus, options.seed) : train_corpus;
  if (data.size() == 0) throw TrainingError("empty detector training corpus");
  const ClassWeights weights = options.weighted ? compute_class_weights(data) : ClassWeights{};

  Detector model(options.shape, options.seed);
  TrainResult result{model, 0, weights, {}};
  std::optional<EpochRecord> best;
  Rng rng(options.seed ^ 0x9e3779b97f4a7c15ULL);
  std::vector<std::size_t> order(data.size());
  std::iota(order.begin(), order.end(), 0);
  std::vector<ad::Tensor> inputs;
  inputs.reserve(data.size());
  for (const auto& s : data.sentences) inputs.push_back(embed_sentence(emb, s));

  for (std::size_t epoch = 1; epoch <= options.epochs; ++epoch) {
    rng.shuffle(std::span<std::size_t>(order));
    double total = 0.0;
    for (auto idx : order) {
      const auto& s = data.sentences[idx];
      if (!s.detector_label) throw ContractError("sentence without a detector label");
      ad::Graph g;
      auto loss = model.loss(g, inputs[idx], *s.detector_label, weights);
      const double value = loss.item();
      if (!std::isfinite(value)) {
        throw TrainingError("non-finite detector loss at epoch " + std::to_string(epoch) + ", sentence " +
                            std::to_string(idx));
      }
      total += value;
      model.params().zero_grad();
      g.backward(loss);
      ad::sgd_step(model.params(), options.lr, options.clip);
    }
    EpochRecord rec;
    rec.epoch = epoch;
    rec.loss = total / static_cast<double>(data.size());
    const auto acc = detector_class_accuracy(model, val, emb);
    rec.acc0 = acc.acc0;
    rec.acc1 = acc.acc1;
    result.epochs.push_back(rec);
    log_info("detector epoch " + std::to_string(epoch) + " loss " + std::to_string(rec.loss));
    if (!best || better(rec, *best)) {
      best = rec;
      result.best_epoch = epoch;
      result.model = model.clone();
    }
  }
  return result;
}

void write_log(std::ostream& out, const std::vector<EpochRecord>& epochs) {
  auto fmt = [](const std::optional<double>& v) {
    if (!v) return std::string("undef");
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6f", *v);
    return std::string(buf);
  };
  out << "epoch,loss,acc0,acc1\n";
  for (const auto& e : epochs) out << e.epoch << ',' << fmt(e.loss) << ',' << fmt(e.acc0) << ',' << fmt(e.acc1) << '\n';
}

}  // namespace seqtag::detector
