#include "seqtag/commands.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "seqtag/checkpoint.hpp"
#include "seqtag/corpus.hpp"
#include "seqtag/detector.hpp"
#include "seqtag/embeddings.hpp"
#include "seqtag/errors.hpp"
#include "seqtag/log.hpp"
#include "seqtag/metrics.hpp"
#include "seqtag/pipeline.hpp"
#include "seqtag/synth.hpp"

namespace seqtag::commands {

namespace {

std::uint64_t seed_of(const Config& config) { return config.get_u64("seed", 1); }

std::string header(const Config& config) { return output_header(config, seed_of(config)); }

std::filesystem::path existing(const Config& config, std::string_view key) {
  std::filesystem::path p = config.require(key);
  if (!std::filesystem::is_regular_file(p)) {
    throw ConfigError("'" + std::string(key) + "' points to '" + p.string() + "', which is not a readable file");
  }
  return p;
}

Partition partition_of(const Config& config) {
  if (!config.has("strong") && !config.has("weak")) return Partition::standard();
  return Partition::parse(config.require("strong"), config.require("weak"));
}

Corpus read(const Config& config, std::string_view key, std::string split, int tag_column = 1,
            bool allow_untagged = false) {
  LoadOptions opts;
  opts.format = parse_format(config.get("format", "conll"));
  opts.tag_column = tag_column;
  opts.allow_untagged = allow_untagged;
  opts.split_name = std::move(split);
  return load_corpus(existing(config, key), opts);
}

EmbeddingMatrix embeddings(const Config& config, std::size_t fallback_dim) {
  return load_embeddings(existing(config, "embeddings"), config.get_size("emb_dim", fallback_dim));
}

std::ofstream open_output(const std::filesystem::path& path) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write '" + path.string() + "'");
  return out;
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  auto out = open_output(path);
  out << text;
  if (!out) throw IoError("write failed for '" + path.string() + "'");
}

void finish_checkpoint(const Config& config, Checkpoint ckpt) {
  ckpt.set("header", header(config));
  save_checkpoint(config.require("out"), ckpt);
}

}  // namespace

std::string stats(const Config& config) {
  const Corpus corpus = read(config, "input", "input", config.get_int("tag_column", -1));
  const auto mode_name = config.get("count", "tokens");
  CountMode mode;
  if (mode_name == "tokens") {
    mode = CountMode::tokens;
  } else if (mode_name == "mentions") {
    mode = CountMode::mentions;
  } else {
    throw ConfigError("count must be tokens or mentions, not '" + mode_name + "'");
  }
  const auto partition = partition_of(config);
  std::string text = header(config) + "\n" + histogram_report(label_histogram(corpus, mode), &partition);
  if (config.has("out")) write_text(config.get("out"), text);
  return text;
}

void train_tagger(const Config& config) {
  const Corpus train = read(config, "train", "train");
  const Corpus val = read(config, "val", "val");
  TaggerTrainOptions o;
  o.shape.hidden = config.get_size("hidden", o.shape.hidden);
  const auto emb = embeddings(config, o.shape.input_dim);
  o.shape.input_dim = emb.dim();
  o.lr = config.get_double("lr", o.lr);
  o.clip = config.get_double("clip", o.clip);
  o.epochs = config.get_size("epochs", o.epochs);
  o.seed = seed_of(config);
  o.keep = parse_keep(config.get("keep", "all"));
  o.flagged_only = config.get_bool("flagged_only", false);
  config.require("out");
  const auto result = train_tagger(train, val, emb, partition_of(config), o);
  auto ckpt = result.model.to_checkpoint();
  ckpt.set("keep", std::string(keep_name(o.keep)));
  ckpt.set("best_epoch", std::to_string(result.best_epoch));
  finish_checkpoint(config, std::move(ckpt));
  if (config.has("log")) {
    std::ostringstream log;
    log << header(config) << '\n';
    write_tagger_log(log, result.epochs);
    write_text(config.get("log"), log.str());
  }
}

void train_detector(const Config& config) {
  const auto partition = partition_of(config);
  const Corpus train = detector_labels(read(config, "train", "train"), partition);
  const Corpus val = detector_labels(read(config, "val", "val"), partition);
  detector::TrainOptions o;
  o.shape.hidden = config.get_size("hidden", o.shape.hidden);
  o.shape.widths = config.get_sizes("widths", o.shape.widths);
  o.shape.filters = config.get_size("filters", o.shape.filters);
  const auto emb = embeddings(config, o.shape.input_dim);
  o.shape.input_dim = emb.dim();
  o.lr = config.get_double("lr", o.lr);
  o.clip = config.get_double("clip", o.clip);
  o.epochs = config.get_size("epochs", o.epochs);
  o.seed = seed_of(config);
  o.weighted = config.get_bool("weighted", true);
  o.balanced = config.get_bool("balanced", false);
  config.require("out");
  const auto result = detector::train(train, val, emb, o);
  auto ckpt = result.model.to_checkpoint();
  ckpt.set("best_epoch", std::to_string(result.best_epoch));
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g,%.17g", result.weights.w0, result.weights.w1);
  ckpt.set("class_weights", buf);
  finish_checkpoint(config, std::move(ckpt));
  if (config.has("log")) {
    std::ostringstream log;
    log << header(config) << '\n';
    detector::write_log(log, result.epochs);
    write_text(config.get("log"), log.str());
  }
}

void predict(const Config& config) {
  const Pipeline pipeline = Pipeline::from_config(config);
  const Corpus input = read(config, "input", "input", config.get_int("tag_column", 1), true);
  const auto result = pipeline.predict(input, config.get_size("threads", 1));
  if (result.stats.ties > 0) {
    log_info(std::to_string(result.stats.ties) + " merge tie(s) resolved toward the Strong tagger");
  }
  auto out = open_output(config.require("output"));
  out << header(config) << '\n';
  write_predictions(out, input, result.predicted);
  if (!out) throw IoError("write failed for '" + config.get("output") + "'");
}

std::string evaluate(const Config& config) {
  // Prediction files carry the predicted tag in their last column.
  const Corpus pred = read(config, "pred", "pred", -1);
  const Corpus gold = read(config, "gold", "gold", config.get_int("tag_column", 1));
  const auto rep = report(pred, gold);
  std::ostringstream text;
  text << header(config) << '\n' << rep.table();
  if (config.has("strong") || config.has("weak")) {
    const auto partition = partition_of(config);
    auto fmt = [](const std::optional<double>& v) {
      if (!v) return std::string("undef");
      char buf[32];
      std::snprintf(buf, sizeof buf, "%.4f", *v);
      return std::string(buf);
    };
    text << "# Strong weighted F1: " << fmt(rep.weighted_over(partition.strong())) << '\n';
    text << "# Weak macro F1: " << fmt(rep.macro_over(partition.weak())) << '\n';
  }
  if (config.has("csv")) write_text(config.get("csv"), header(config) + "\n" + rep.csv());
  if (config.has("out")) write_text(config.get("out"), text.str());
  return text.str();
}

void synth(const Config& config) {
  const auto spec = synth::SynthSpec::from_config(config);
  synth::write(config.require("out_dir"), synth::generate(spec), header(config));
}

}  // namespace seqtag::commands
