// Command-line front end over the C API.

#include <CLI11.hpp>

#include <cstdio>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "seqtag/seqtag.h"

namespace {

struct ConfigHandle {
  seqtag_config* ptr = nullptr;
  ~ConfigHandle() { seqtag_config_free(ptr); }
};

// Flag values keyed by the config key they override.
struct Flags {
  std::map<std::string, std::string> values;
  std::vector<std::string> raw_sets;
  std::string config_path;

  void option(CLI::App* app, const std::string& flag, const std::string& key, const std::string& help) {
    app->add_option(flag, values[key], help);
  }
  void toggle(CLI::App* app, const std::string& flag, const std::string& key, bool value, const std::string& help) {
    app->add_flag_callback(flag, [this, key, value] { values[key] = value ? "true" : "false"; }, help);
  }
};

int report_failure(seqtag_status status) {
  std::fprintf(stderr, "seqtag: %s\n", seqtag_last_error());
  return static_cast<int>(status);
}

void print_and_free(char* text) {
  std::fputs(text, stdout);
  seqtag_string_free(text);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Sequence tagging under class imbalance"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(seqtag_version()));

  Flags flags;
  int verbosity = 1;
  app.add_option("-c,--config", flags.config_path, "Config file of key = value lines")->check(CLI::ExistingFile);
  app.add_option("--set", flags.raw_sets, "Extra key=value setting (repeatable)");
  app.add_flag_callback("-q,--quiet", [&] { verbosity = 0; }, "Only print errors");
  app.add_flag_callback("-v,--verbose", [&] { verbosity = 2; }, "Print progress");

  auto* stats = app.add_subcommand("stats", "Label histogram of a corpus");
  flags.option(stats, "input,--input", "input", "Corpus file");
  flags.option(stats, "--format", "format", "conll or csv");
  flags.option(stats, "--count", "count", "tokens or mentions");
  flags.option(stats, "--strong", "strong", "Comma-separated Strong types");
  flags.option(stats, "--weak", "weak", "Comma-separated Weak types");
  flags.option(stats, "--tag-column", "tag_column", "Tag column of conll rows (-1 = last)");
  flags.option(stats, "-o,--out", "out", "Also write the report here");

  auto* train = app.add_subcommand("train", "Train a tagger or the detector");
  train->require_subcommand(1);
  auto shared_train = [&](CLI::App* sub) {
    flags.option(sub, "--train", "train", "Training corpus");
    flags.option(sub, "--val", "val", "Validation corpus");
    flags.option(sub, "--embeddings", "embeddings", "Pretrained vectors (text or EMB1 cache)");
    flags.option(sub, "--emb-dim", "emb_dim", "Embedding dimension of a text vector file");
    flags.option(sub, "--format", "format", "conll or csv");
    flags.option(sub, "--strong", "strong", "Comma-separated Strong types");
    flags.option(sub, "--weak", "weak", "Comma-separated Weak types");
    flags.option(sub, "--hidden", "hidden", "LSTM hidden size per direction");
    flags.option(sub, "--lr", "lr", "Learning rate");
    flags.option(sub, "--clip", "clip", "Gradient norm clip");
    flags.option(sub, "--epochs", "epochs", "Training epochs");
    flags.option(sub, "--seed", "seed", "Random seed");
    flags.option(sub, "-o,--out", "out", "Checkpoint path");
    flags.option(sub, "--log", "log", "Per-epoch CSV log path");
  };
  auto* tagger = train->add_subcommand("tagger", "Bi-LSTM-CRF tagger");
  shared_train(tagger);
  flags.option(tagger, "--keep", "keep", "all, strong or weak");
  flags.toggle(tagger, "--flagged-only", "flagged_only", true, "Train on sentences with a Weak entity only");
  auto* detector = train->add_subcommand("detector", "Weak-entity sentence detector");
  shared_train(detector);
  flags.option(detector, "--widths", "widths", "Comma-separated convolution widths");
  flags.option(detector, "--filters", "filters", "Filters per width");
  flags.toggle(detector, "--balanced", "balanced", true, "Train on a balanced subsample");
  flags.toggle(detector, "--unweighted", "weighted", false, "Plain cross-entropy instead of the weighted loss");

  auto* predict = app.add_subcommand("predict", "Tag a corpus");
  flags.option(predict, "--mode", "mode", "single, double or adaptive");
  flags.option(predict, "--single", "checkpoint.single", "Single tagger checkpoint");
  flags.option(predict, "--strong-model", "checkpoint.strong", "Strong tagger checkpoint");
  flags.option(predict, "--weak-model", "checkpoint.weak", "Weak tagger checkpoint");
  flags.option(predict, "--detector", "checkpoint.detector", "Detector checkpoint");
  flags.option(predict, "--threshold", "threshold", "Detector threshold on s1");
  flags.option(predict, "--embeddings", "embeddings", "Pretrained vectors");
  flags.option(predict, "--emb-dim", "emb_dim", "Embedding dimension of a text vector file");
  flags.option(predict, "--input", "input", "Corpus to tag");
  flags.option(predict, "--format", "format", "conll or csv");
  flags.option(predict, "--threads", "threads", "Worker threads");
  flags.option(predict, "-o,--output", "output", "conll-3col output path");

  auto* evaluate = app.add_subcommand("evaluate", "Score predictions against gold tags");
  flags.option(evaluate, "--pred", "pred", "Predictions (tag in the last column)");
  flags.option(evaluate, "--gold", "gold", "Gold corpus");
  flags.option(evaluate, "--format", "format", "conll or csv");
  flags.option(evaluate, "--strong", "strong", "Comma-separated Strong types");
  flags.option(evaluate, "--weak", "weak", "Comma-separated Weak types");
  flags.option(evaluate, "--csv", "csv", "class,f1,support output path");
  flags.option(evaluate, "-o,--out", "out", "Also write the report here");

  auto* synth = app.add_subcommand("synth", "Generate a synthetic imbalanced corpus");
  flags.option(synth, "-o,--out-dir", "out_dir", "Output directory");
  flags.option(synth, "--ratio", "ratio", "Strong:Weak token ratio");
  flags.option(synth, "--train-size", "synth.train", "Training sentences");
  flags.option(synth, "--val-size", "synth.val", "Validation sentences");
  flags.option(synth, "--test-size", "synth.test", "Test sentences");
  flags.option(synth, "--emb-dim", "emb_dim", "Embedding dimension");
  flags.option(synth, "--seed", "seed", "Random seed");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return SEQTAG_ERR_USAGE;
  }
  seqtag_set_verbosity(verbosity);

  ConfigHandle config;
  seqtag_status st = flags.config_path.empty() ? seqtag_config_new(&config.ptr)
                                               : seqtag_config_load(flags.config_path.c_str(), &config.ptr);
  if (st != SEQTAG_OK) return report_failure(st);
  ConfigHandle overrides;
  if ((st = seqtag_config_new(&overrides.ptr)) != SEQTAG_OK) return report_failure(st);
  for (const auto& kv : flags.raw_sets) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos || eq == 0) {
      std::fprintf(stderr, "seqtag: --set expects key=value, got '%s'\n", kv.c_str());
      return SEQTAG_ERR_USAGE;
    }
    seqtag_config_set(overrides.ptr, kv.substr(0, eq).c_str(), kv.substr(eq + 1).c_str());
  }
  // Only flags given on the command line are non-empty, so they override the file.
  for (const auto& [key, value] : flags.values) {
    if (!value.empty()) seqtag_config_set(overrides.ptr, key.c_str(), value.c_str());
  }
  if ((st = seqtag_config_merge(config.ptr, overrides.ptr)) != SEQTAG_OK) return report_failure(st);

  char* text = nullptr;
  if (stats->parsed()) {
    st = seqtag_stats(config.ptr, &text);
  } else if (tagger->parsed()) {
    st = seqtag_train_tagger(config.ptr);
  } else if (detector->parsed()) {
    st = seqtag_train_detector(config.ptr);
  } else if (predict->parsed()) {
    st = seqtag_predict(config.ptr);
  } else if (evaluate->parsed()) {
    st = seqtag_evaluate(config.ptr, &text);
  } else if (synth->parsed()) {
    st = seqtag_synth(config.ptr);
  }
  if (st != SEQTAG_OK) return report_failure(st);
  if (text) print_and_free(text);
  return 0;
}
