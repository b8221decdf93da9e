#include "seqtag/seqtag.h"

#include <cstring>
#include <sstream>
#include <string>

#include "seqtag/commands.hpp"
#include "seqtag/config.hpp"
#include "seqtag/corpus.hpp"
#include "seqtag/errors.hpp"
#include "seqtag/log.hpp"
#include "seqtag/pipeline.hpp"

struct seqtag_config {
  seqtag::Config config;
};

struct seqtag_corpus {
  seqtag::Corpus corpus;
};

struct seqtag_pipeline {
  seqtag::Pipeline pipeline;
};

namespace {

thread_local std::string last_error;

seqtag_status fail(seqtag_status status, const char* message) {
  last_error = message;
  return status;
}

// Runs `body`, translating exceptions into status codes.
template <typename Body>
seqtag_status guarded(Body&& body) {
  try {
    last_error.clear();
    body();
    return SEQTAG_OK;
  } catch (const seqtag::ConfigError& e) {
    return fail(SEQTAG_ERR_USAGE, e.what());
  } catch (const seqtag::TrainingError& e) {
    return fail(SEQTAG_ERR_TRAINING, e.what());
  } catch (const seqtag::Error& e) {
    return fail(SEQTAG_ERR_DATA, e.what());
  } catch (const std::exception& e) {
    return fail(SEQTAG_ERR_INTERNAL, e.what());
  } catch (...) {
    return fail(SEQTAG_ERR_INTERNAL, "unknown error");
  }
}

char* dup(const std::string& s) {
  char* out = new char[s.size() + 1];
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

void require(bool ok, const char* what) {
  if (!ok) throw seqtag::ConfigError(std::string("null argument: ") + what);
}

}  // namespace

extern "C" {

const char* seqtag_version(void) { return seqtag::kVersion.data(); }

const char* seqtag_last_error(void) { return last_error.c_str(); }

void seqtag_string_free(char* s) { delete[] s; }

seqtag_status seqtag_config_new(seqtag_config** out) {
  return guarded([&] {
    require(out, "out");
    *out = new seqtag_config{};
  });
}

seqtag_status seqtag_config_load(const char* path, seqtag_config** out) {
  return guarded([&] {
    require(path && out, "path/out");
    *out = new seqtag_config{seqtag::Config::load(path)};
  });
}

seqtag_status seqtag_config_set(seqtag_config* config, const char* key, const char* value) {
  return guarded([&] {
    require(config && key && value, "config/key/value");
    config->config.set(key, value);
  });
}

seqtag_status seqtag_config_get(const seqtag_config* config, const char* key, char** value) {
  return guarded([&] {
    require(config && key && value, "config/key/value");
    *value = config->config.has(key) ? dup(config->config.get(key)) : nullptr;
  });
}

seqtag_status seqtag_config_merge(seqtag_config* config, const seqtag_config* overrides) {
  return guarded([&] {
    require(config && overrides, "config/overrides");
    config->config.merge(overrides->config);
  });
}

seqtag_status seqtag_config_hash(const seqtag_config* config, char** hash) {
  return guarded([&] {
    require(config && hash, "config/hash");
    *hash = dup(config->config.hash());
  });
}

seqtag_status seqtag_config_header(const seqtag_config* config, char** header) {
  return guarded([&] {
    require(config && header, "config/header");
    *header = dup(seqtag::output_header(config->config, config->config.get_u64("seed", 1)));
  });
}

void seqtag_config_free(seqtag_config* config) { delete config; }

seqtag_status seqtag_corpus_load(const char* path, const char* format, seqtag_corpus** out) {
  return guarded([&] {
    require(path && out, "path/out");
    seqtag::LoadOptions opts;
    opts.format = seqtag::parse_format(format ? format : "conll");
    *out = new seqtag_corpus{seqtag::load_corpus(path, opts)};
  });
}

size_t seqtag_corpus_sentences(const seqtag_corpus* corpus) { return corpus ? corpus->corpus.size() : 0; }

size_t seqtag_corpus_tokens(const seqtag_corpus* corpus) { return corpus ? corpus->corpus.token_count() : 0; }

seqtag_status seqtag_corpus_save(const seqtag_corpus* corpus, const char* path) {
  return guarded([&] {
    require(corpus && path, "corpus/path");
    seqtag::save_conll(path, corpus->corpus);
  });
}

void seqtag_corpus_free(seqtag_corpus* corpus) { delete corpus; }

seqtag_status seqtag_stats(const seqtag_config* config, char** report) {
  return guarded([&] {
    require(config && report, "config/report");
    *report = dup(seqtag::commands::stats(config->config));
  });
}

seqtag_status seqtag_train_tagger(const seqtag_config* config) {
  return guarded([&] {
    require(config, "config");
    seqtag::commands::train_tagger(config->config);
  });
}

seqtag_status seqtag_train_detector(const seqtag_config* config) {
  return guarded([&] {
    require(config, "config");
    seqtag::commands::train_detector(config->config);
  });
}

seqtag_status seqtag_predict(const seqtag_config* config) {
  return guarded([&] {
    require(config, "config");
    seqtag::commands::predict(config->config);
  });
}

seqtag_status seqtag_evaluate(const seqtag_config* config, char** report) {
  return guarded([&] {
    require(config && report, "config/report");
    *report = dup(seqtag::commands::evaluate(config->config));
  });
}

seqtag_status seqtag_synth(const seqtag_config* config) {
  return guarded([&] {
    require(config, "config");
    seqtag::commands::synth(config->config);
  });
}

seqtag_status seqtag_pipeline_open(const seqtag_config* config, seqtag_pipeline** out) {
  return guarded([&] {
    require(config && out, "config/out");
    *out = new seqtag_pipeline{seqtag::Pipeline::from_config(config->config)};
  });
}

seqtag_status seqtag_pipeline_tag(const seqtag_pipeline* pipeline, const char* tokens, char** tags) {
  return guarded([&] {
    require(pipeline && tokens && tags, "pipeline/tokens/tags");
    seqtag::Sentence s;
    std::istringstream in(tokens);
    std::string word;
    while (in >> word) s.tokens.push_back({word, std::string(seqtag::kOutside)});
    const auto result = pipeline->pipeline.predict(s);
    std::string joined;
    for (std::size_t i = 0; i < result.tags.size(); ++i) {
      if (i) joined += ' ';
      joined += result.tags[i];
    }
    *tags = dup(joined);
  });
}

void seqtag_pipeline_free(seqtag_pipeline* pipeline) { delete pipeline; }

void seqtag_set_verbosity(int level) {
  seqtag::set_log_level(level <= 0 ? seqtag::LogLevel::quiet
                                   : level == 1 ? seqtag::LogLevel::warning : seqtag::LogLevel::info);
}

}  // extern "C"
