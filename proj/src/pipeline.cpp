#include "seqtag/pipeline.hpp"

#include <cmath>
#include <cstdio>
#include <numeric>
#include <ostream>
#include <thread>

#include "seqtag/checkpoint.hpp"
#include "seqtag/errors.hpp"
#include "seqtag/log.hpp"
#include "seqtag/metrics.hpp"
#include "seqtag/rng.hpp"

namespace seqtag {

Keep parse_keep(std::string_view name) {
  if (name == "all") return Keep::all;
  if (name == "strong") return Keep::strong;
  if (name == "weak") return Keep::weak;
  throw ConfigError("unknown tag group '" + std::string(name) + "' (expected all, strong or weak)");
}

std::string_view keep_name(Keep keep) {
  switch (keep) {
    case Keep::all: return "all";
    case Keep::strong: return "strong";
    case Keep::weak: return "weak";
  }
  return "all";
}

namespace {

Corpus restrict(const Corpus& corpus, const Partition& partition, Keep keep) {
  if (keep == Keep::all) {
    for (const auto& s : corpus.sentences)
      for (const auto& t : s.tokens) partition.check_covers(tag_type(t.tag));
    return corpus;
  }
  return mask_labels(corpus, partition, keep == Keep::strong ? EntityGroup::strong : EntityGroup::weak);
}

bool has_weak(const Sentence& s, const Partition& partition) {
  for (const auto& t : s.tokens)
    if (partition.is_weak(tag_type(t.tag))) return true;
  return false;
}

std::optional<double> validation_f1(const Tagger& model, const Corpus& val, const EmbeddingMatrix& emb) {
  if (val.size() == 0) return std::nullopt;
  Corpus pred = val;
  for (auto& s : pred.sentences) {
    if (s.size() == 0) continue;
    const auto tags = model.decode(embed_sentence(emb, s));
    for (std::size_t i = 0; i < tags.size(); ++i) s.tokens[i].tag = tags[i];
  }
  std::vector<std::string> classes;
  for (const auto& type : model.tags().types())
    if (type != kOutside) classes.push_back(type);
  return report(pred, val, classes).weighted_over(classes);
}

}  // namespace

TaggerTrainResult train_tagger(const Corpus& train, const Corpus& val, const EmbeddingMatrix& emb,
                               const Partition& partition, const TaggerTrainOptions& options) {
  if (options.shape.input_dim != emb.dim()) {
    throw ConfigError("tagger input_dim " + std::to_string(options.shape.input_dim) + " differs from embedding dim " +
                      std::to_string(emb.dim()));
  }
  Corpus source = train;
  if (options.flagged_only) {
    source.sentences.clear();
    for (const auto& s : train.sentences)
      if (has_weak(s, partition)) source.sentences.push_back(s);
  }
  const Corpus data = restrict(source, partition, options.keep);
  const Corpus gold_val = restrict(val, partition, options.keep);

  TagSet tags;
  for (const auto& s : data.sentences)
    for (const auto& t : s.tokens) tags.add(t.tag);
  if (tags.size() < 2) {
    throw ConfigError("no " + std::string(keep_name(options.keep)) + " entity tags in the training corpus");
  }

  std::vector<std::size_t> usable;
  std::vector<ad::Tensor> inputs(data.size());
  std::vector<std::vector<std::size_t>> gold(data.size());
  for (std::size_t i = 0; i < data.size(); ++i) {
    const auto& s = data.sentences[i];
    if (s.size() == 0) continue;
    usable.push_back(i);
    inputs[i] = embed_sentence(emb, s);
    gold[i].reserve(s.size());
    for (const auto& t : s.tokens) gold[i].push_back(tags.index(t.tag));
  }
  if (usable.empty()) throw TrainingError("empty tagger training corpus");

  Tagger model(tags, options.shape, options.seed);
  TaggerTrainResult result{model, 0, {}};
  std::optional<double> best;
  bool have_best = false;
  Rng rng(options.seed ^ 0x9e3779b97f4a7c15ULL);

  for (std::size_t epoch = 1; epoch <= options.epochs; ++epoch) {
    rng.shuffle(std::span<std::size_t>(usable));
    double total = 0.0;
    for (auto idx : usable) {
      ad::Graph g;
      auto loss = model.loss(g, inputs[idx], gold[idx]);
      const double value = loss.item();
      if (!std::isfinite(value)) {
        throw TrainingError("non-finite tagger loss at epoch " + std::to_string(epoch) + ", sentence " +
                            std::to_string(idx));
      }
      total += value;
      model.params().zero_grad();
      g.backward(loss);
      ad::sgd_step(model.params(), options.lr, options.clip);
      model.constrain();
    }
    TaggerEpoch rec;
    rec.epoch = epoch;
    rec.loss = total / static_cast<double>(usable.size());
    rec.val_f1 = validation_f1(model, gold_val, emb);
    result.epochs.push_back(rec);
    log_info("tagger epoch " + std::to_string(epoch) + " loss " + std::to_string(rec.loss));
    // Later epochs win ties, so an all-undefined validation keeps the last.
    const double current = rec.val_f1.value_or(-1.0);
    if (!have_best || current >= best.value_or(-1.0)) {
      have_best = true;
      best = rec.val_f1;
      result.best_epoch = epoch;
      result.model = model.clone();
    }
  }
  return result;
}

void write_tagger_log(std::ostream& out, const std::vector<TaggerEpoch>& epochs) {
  auto fmt = [](const std::optional<double>& v) {
    if (!v) return std::string("undef");
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6f", *v);
    return std::string(buf);
  };
  out << "epoch,loss,val_weighted_f1\n";
  for (const auto& e : epochs) out << e.epoch << ',' << fmt(e.loss) << ',' << fmt(e.val_f1) << '\n';
}

std::vector<std::string> merge_positionwise(const Prediction& strong, const Prediction& weak, MergeStats* stats) {
  if (strong.tags.size() != weak.tags.size()) {
    throw ContractError("merging predictions of lengths " + std::to_string(strong.tags.size()) + " and " +
                        std::to_string(weak.tags.size()));
  }
  std::vector<std::string> out(strong.tags.size());
  for (std::size_t i = 0; i < out.size(); ++i) {
    const auto& s = strong.tags[i];
    const auto& w = weak.tags[i];
    if (is_outside(s)) {
      out[i] = w;
      continue;
    }
    if (is_outside(w)) {
      out[i] = s;
      continue;
    }
    const double ps = strong.confidence.at(i);
    const double pw = weak.confidence.at(i);
    if (stats) ++stats->conflicts;
    if (pw > ps) {
      out[i] = w;
      if (stats) ++stats->weak_wins;
    } else {
      out[i] = s;
      if (pw == ps) {
        if (stats) ++stats->ties;
        log_info("merge tie at position " + std::to_string(i) + " between " + s + " and " + w + "; keeping " + s);
      }
    }
  }
  return out;
}

Mode parse_mode(std::string_view name) {
  if (name == "single") return Mode::single;
  if (name == "double") return Mode::double_merge;
  if (name == "adaptive") return Mode::adaptive;
  throw ConfigError("unknown mode '" + std::string(name) + "' (expected single, double or adaptive)");
}

std::string_view mode_name(Mode mode) {
  switch (mode) {
    case Mode::single: return "single";
    case Mode::double_merge: return "double";
    case Mode::adaptive: return "adaptive";
  }
  return "single";
}

Pipeline::Pipeline(Mode mode, EmbeddingMatrix emb, PipelineModels models, double threshold)
    : mode_(mode), emb_(std::move(emb)), models_(std::move(models)), threshold_(threshold) {
  auto need = [&](bool present, const char* what) {
    if (!present) throw ConfigError(std::string(mode_name(mode_)) + " mode needs a " + what + " model");
  };
  switch (mode_) {
    case Mode::single:
      need(models_.single.has_value(), "single");
      break;
    case Mode::adaptive:
      need(models_.detector.has_value(), "detector");
      [[fallthrough]];
    case Mode::double_merge:
      need(models_.strong.has_value(), "strong");
      need(models_.weak.has_value(), "weak");
      break;
  }
  auto check_dim = [&](std::size_t dim, const char* what) {
    if (dim != emb_.dim()) {
      throw ConfigError(std::string(what) + " model expects " + std::to_string(dim) + "-d inputs, embeddings are " +
                        std::to_string(emb_.dim()) + "-d");
    }
  };
  if (models_.single) check_dim(models_.single->shape().input_dim, "single");
  if (models_.strong) check_dim(models_.strong->shape().input_dim, "strong");
  if (models_.weak) check_dim(models_.weak->shape().input_dim, "weak");
  if (models_.detector) check_dim(models_.detector->shape().input_dim, "detector");
  if (!(threshold_ >= 0.0 && threshold_ <= 1.0)) throw ConfigError("threshold must lie in [0, 1]");
}

Pipeline Pipeline::from_config(const Config& config) {
  const Mode mode = parse_mode(config.get("mode", "single"));
  auto load = [&](const char* key) -> Checkpoint {
    const std::string k = std::string("checkpoint.") + key;
    if (!config.has(k)) throw ConfigError(std::string(mode_name(mode)) + " mode needs '" + k + "'");
    return load_checkpoint(config.get(k));
  };
  PipelineModels models;
  std::size_t dim = 0;
  if (mode == Mode::single) {
    models.single = Tagger::from_checkpoint(load("single"));
    dim = models.single->shape().input_dim;
  } else {
    models.strong = Tagger::from_checkpoint(load("strong"));
    models.weak = Tagger::from_checkpoint(load("weak"));
    dim = models.strong->shape().input_dim;
    if (mode == Mode::adaptive) models.detector = detector::Detector::from_checkpoint(load("detector"));
  }
  EmbeddingMatrix emb = load_embeddings(config.require("embeddings"), config.get_size("emb_dim", dim));
  return Pipeline(mode, std::move(emb), std::move(models), config.get_double("threshold", 0.5));
}

Pipeline::Result Pipeline::predict(const Sentence& sentence, MergeStats* stats) const {
  Result out;
  if (sentence.size() == 0) return out;
  const auto inputs = embed_sentence(emb_, sentence);
  switch (mode_) {
    case Mode::single:
      out.tags = models_.single->decode(inputs);
      break;
    case Mode::double_merge:
      out.tags = merge_positionwise(models_.strong->predict(inputs), models_.weak->predict(inputs), stats);
      break;
    case Mode::adaptive: {
      const auto [s0, s1] = models_.detector->scores(inputs);
      out.gate = s1 >= threshold_ ? 1 : 0;
      if (*out.gate == 1) {
        out.tags = merge_positionwise(models_.strong->predict(inputs), models_.weak->predict(inputs), stats);
      } else {
        out.tags = models_.strong->decode(inputs);
      }
      break;
    }
  }
  return out;
}

Pipeline::CorpusResult Pipeline::predict(const Corpus& corpus, std::size_t threads) const {
  CorpusResult out;
  out.predicted = corpus;
  out.gates.resize(corpus.size());
  const std::size_t n = corpus.size();
  const std::size_t workers = std::max<std::size_t>(1, std::min(threads, n));
  std::vector<MergeStats> stats(workers);
  auto run = [&](std::size_t w) {
    for (std::size_t i = w; i < n; i += workers) {
      auto r = predict(corpus.sentences[i], &stats[w]);
      auto& s = out.predicted.sentences[i];
      for (std::size_t t = 0; t < r.tags.size(); ++t) s.tokens[t].tag = std::move(r.tags[t]);
      out.gates[i] = r.gate;
    }
  };
  if (workers == 1) {
    run(0);
  } else {
    std::vector<std::thread> pool;
    std::vector<std::exception_ptr> errors(workers);
    for (std::size_t w = 0; w < workers; ++w) {
      pool.emplace_back([&, w] {
        try {
          run(w);
        } catch (...) {
          errors[w] = std::current_exception();
        }
      });
    }
    for (auto& t : pool) t.join();
    for (auto& e : errors)
      if (e) std::rethrow_exception(e);
  }
  TagSet tags;
  for (const auto& s : out.predicted.sentences)
    for (const auto& t : s.tokens) tags.add(t.tag);
  out.predicted.tags = std::move(tags);
  for (const auto& s : stats) {
    out.stats.conflicts += s.conflicts;
    out.stats.weak_wins += s.weak_wins;
    out.stats.ties += s.ties;
  }
  return out;
}

void write_predictions(std::ostream& out, const Corpus& input, const Corpus& predicted) {
  if (input.size() != predicted.size()) throw ContractError("prediction corpus does not match its input");
  for (std::size_t i = 0; i < input.size(); ++i) {
    const auto& a = input.sentences[i].tokens;
    const auto& b = predicted.sentences[i].tokens;
    if (a.size() != b.size()) throw ContractError("prediction sentence length does not match its input");
    for (std::size_t t = 0; t < a.size(); ++t) out << a[t].surface << '\t' << a[t].tag << '\t' << b[t].tag << '\n';
    out << '\n';
  }
}

}  // namespace seqtag
