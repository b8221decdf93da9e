#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "seqtag/config.hpp"
#include "seqtag/corpus.hpp"
#include "seqtag/detector.hpp"
#include "seqtag/embeddings.hpp"
#include "seqtag/tagger.hpp"

namespace seqtag {

enum class Keep { all, strong, weak };

Keep parse_keep(std::string_view name);
std::string_view keep_name(Keep keep);

struct TaggerTrainOptions {
  TaggerShape shape;
  double lr = 0.05;
  double clip = 5.0;
  std::size_t epochs = 10;
  std::uint64_t seed = 1;
  Keep keep = Keep::all;
  // Train only on sentences holding a Weak-type entity, the population the
  // detector routes to the Weak tagger at prediction time.
  bool flagged_only = false;
};

struct TaggerEpoch {
  std::size_t epoch = 0;
  double loss = 0.0;
  std::optional<double> val_f1;
};

struct TaggerTrainResult {
  Tagger model;
  std::size_t best_epoch = 0;
  std::vector<TaggerEpoch> epochs;
};

// Masks both corpora to the kept group, trains by minimizing the summed CRF
// negative log-likelihood one sentence at a time, and returns the epoch with
// the best validation weighted F1 over the kept entity types.
TaggerTrainResult train_tagger(const Corpus& train, const Corpus& val, const EmbeddingMatrix& emb,
                               const Partition& partition, const TaggerTrainOptions& options);

// "epoch,loss,val_weighted_f1" rows.
void write_tagger_log(std::ostream& out, const std::vector<TaggerEpoch>& epochs);

struct MergeStats {
  std::size_t conflicts = 0;
  std::size_t weak_wins = 0;
  std::size_t ties = 0;
};

// Position-wise vote: where one side says O the other side's tag is taken;
// where both name an entity the side with the higher posterior on its own tag
// wins, Strong on ties.
std::vector<std::string> merge_positionwise(const Prediction& strong, const Prediction& weak,
                                            MergeStats* stats = nullptr);

enum class Mode {
  single,        // one tagger over all classes
  double_merge,  // Strong and Weak taggers always merged
  adaptive,      // merge only when the detector flags a Weak entity
};

Mode parse_mode(std::string_view name);
std::string_view mode_name(Mode mode);

struct PipelineModels {
  std::optional<Tagger> single;
  std::optional<Tagger> strong;
  std::optional<Tagger> weak;
  std::optional<detector::Detector> detector;
};

class Pipeline {
 public:
  Pipeline(Mode mode, EmbeddingMatrix emb, PipelineModels models, double threshold = 0.5);

  // Keys: mode, checkpoint.{single,strong,weak,detector}, threshold,
  // embeddings, emb_dim.
  static Pipeline from_config(const Config& config);

  struct Result {
    std::vector<std::string> tags;
    std::optional<int> gate;  // detector decision, adaptive mode only
  };

  Result predict(const Sentence& sentence, MergeStats* stats = nullptr) const;

  struct CorpusResult {
    Corpus predicted;
    std::vector<std::optional<int>> gates;
    MergeStats stats;
  };

  // Sentences are independent; with threads > 1 they are spread over workers
  // and reassembled in input order.
  CorpusResult predict(const Corpus& corpus, std::size_t threads = 1) const;

  Mode mode() const { return mode_; }
  double threshold() const { return threshold_; }
  const EmbeddingMatrix& embeddings() const { return emb_; }
  const PipelineModels& models() const { return models_; }

 private:
  Mode mode_;
  EmbeddingMatrix emb_;
  PipelineModels models_;
  double threshold_;
};

// conll-3col: surface, input tag, predicted tag.
void write_predictions(std::ostream& out, const Corpus& input, const Corpus& predicted);

}  // namespace seqtag
