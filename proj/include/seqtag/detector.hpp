#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "seqtag/autodiff.hpp"
#include "seqtag/checkpoint.hpp"
#include "seqtag/encoder.hpp"

namespace seqtag {

struct Corpus;
class EmbeddingMatrix;

namespace detector {

// Per-class loss weights, normalized to sum to 1.
struct ClassWeights {
  double w0 = 0.5;
  double w1 = 0.5;

  static ClassWeights normalized(double w0, double w1);
};

// Each class is weighted by the other class's frequency, damping the majority
// class: w0 = n1 / (n0 + n1), w1 = n0 / (n0 + n1).
ClassWeights compute_class_weights(std::size_t n0, std::size_t n1);
ClassWeights compute_class_weights(const Corpus& corpus);

// -w0 t0 ln s0 - w1 t1 ln s1 with one-hot t. The target-class score is clamped
// to 1e-12 from below; each clamp bumps clamp_count().
double weighted_bce(double s0, double s1, int target, const ClassWeights& weights);
std::size_t clamp_count();

struct DetectorShape {
  std::size_t input_dim = 100;
  std::size_t hidden = 100;
  std::vector<std::size_t> widths{2, 3, 4};
  std::size_t filters = 50;
};

// Sentence classifier: Bi-LSTM over the embeddings, one 1-D convolution per
// width with ReLU and max-over-time pooling, then a 2-way affine layer.
class Detector {
 public:
  Detector(DetectorShape shape, std::uint64_t seed);
  static Detector from_checkpoint(const Checkpoint& ckpt);
  Checkpoint to_checkpoint() const;
  // Copies share parameter tensors; clone() owns fresh ones.
  Detector clone() const { return from_checkpoint(to_checkpoint()); }

  const DetectorShape& shape() const { return shape_; }
  ad::ParameterSet& params() { return params_; }
  const ad::ParameterSet& params() const { return params_; }

  // Rows of `inputs` past `length` are padding and are ignored. Returns the
  // 2 x 1 class logits.
  ad::Tensor logits(ad::Graph& g, const ad::Tensor& inputs, std::size_t length) const;
  ad::Tensor logits(ad::Graph& g, const ad::Tensor& inputs) const { return logits(g, inputs, inputs.rows()); }

  // Softmax scores (s0, s1).
  std::pair<double, double> scores(const ad::Tensor& inputs, std::size_t length) const;
  std::pair<double, double> scores(const ad::Tensor& inputs) const { return scores(inputs, inputs.rows()); }

  ad::Tensor loss(ad::Graph& g, const ad::Tensor& inputs, int target, const ClassWeights& weights) const;

 private:
  Detector(DetectorShape shape, ad::ParameterSet params);
  void bind();

  DetectorShape shape_;
  ad::ParameterSet params_;
  encoder::BiLstmWeights lstm_;
  std::vector<std::pair<ad::Tensor, ad::Tensor>> convs_;
  ad::Tensor out_w_;
  ad::Tensor out_b_;
};

// Weighted loss from logits: -w_target * log_softmax(logits)[target].
ad::Tensor weighted_bce_loss(ad::Graph& g, const ad::Tensor& logits, int target, const ClassWeights& weights);

// Per-class accuracy; an empty class yields an empty optional.
struct ClassAccuracy {
  std::optional<double> acc0;
  std::optional<double> acc1;
};

ClassAccuracy class_accuracy(std::span<const int> predicted, std::span<const int> gold);
// Predicts 1 iff s1 >= threshold.
ClassAccuracy detector_class_accuracy(const Detector& model, const Corpus& corpus, const EmbeddingMatrix& emb,
                                      double threshold = 0.5);

struct TrainOptions {
  DetectorShape shape;
  double lr = 0.05;
  double clip = 5.0;
  std::size_t epochs = 10;
  std::uint64_t seed = 1;
  bool weighted = true;
  bool balanced = false;
};

struct EpochRecord {
  std::size_t epoch = 0;
  double loss = 0.0;
  std::optional<double> acc0;
  std::optional<double> acc1;
};

struct TrainResult {
  Detector model;
  std::size_t best_epoch = 0;
  ClassWeights weights;
  std::vector<EpochRecord> epochs;
};

// Sentence-at-a-time SGD. After every epoch the validation per-class accuracy
// is measured; the epoch with the highest class-1 accuracy wins, class-0
// accuracy breaking ties. Both corpora need detector labels.
TrainResult train(const Corpus& train, const Corpus& val, const EmbeddingMatrix& emb, const TrainOptions& options);

// "epoch,loss,acc0,acc1" rows.
void write_log(std::ostream& out, const std::vector<EpochRecord>& epochs);

}  // namespace detector
}  // namespace seqtag
