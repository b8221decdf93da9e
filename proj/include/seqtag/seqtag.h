#ifndef SEQTAG_H
#define SEQTAG_H

#include <stddef.h>

#if defined(_WIN32)
#define SEQTAG_API __declspec(dllexport)
#else
#define SEQTAG_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

/* Status codes double as CLI exit codes. */
typedef enum seqtag_status {
  SEQTAG_OK = 0,
  SEQTAG_ERR_USAGE = 1,    /* bad arguments, config, or missing files */
  SEQTAG_ERR_DATA = 2,     /* malformed or inconsistent input data */
  SEQTAG_ERR_TRAINING = 3, /* training aborted */
  SEQTAG_ERR_INTERNAL = 4  /* unexpected failure */
} seqtag_status;

typedef struct seqtag_config seqtag_config;
typedef struct seqtag_corpus seqtag_corpus;
typedef struct seqtag_pipeline seqtag_pipeline;

SEQTAG_API const char* seqtag_version(void);

/* Message of the last failure on the calling thread; empty when none. */
SEQTAG_API const char* seqtag_last_error(void);

/* Releases strings returned through char** out-parameters. */
SEQTAG_API void seqtag_string_free(char* s);

SEQTAG_API seqtag_status seqtag_config_new(seqtag_config** out);
/* Reads "key = value" lines; '#' starts a comment. */
SEQTAG_API seqtag_status seqtag_config_load(const char* path, seqtag_config** out);
SEQTAG_API seqtag_status seqtag_config_set(seqtag_config* config, const char* key, const char* value);
/* *value is NULL when the key is absent. */
SEQTAG_API seqtag_status seqtag_config_get(const seqtag_config* config, const char* key, char** value);
/* Entries of `overrides` replace those of `config`. */
SEQTAG_API seqtag_status seqtag_config_merge(seqtag_config* config, const seqtag_config* overrides);
SEQTAG_API seqtag_status seqtag_config_hash(const seqtag_config* config, char** hash);
/* "# seqtag <version> config=<hash> seed=<seed>" */
SEQTAG_API seqtag_status seqtag_config_header(const seqtag_config* config, char** header);
SEQTAG_API void seqtag_config_free(seqtag_config* config);

/* format is "conll" or "csv". */
SEQTAG_API seqtag_status seqtag_corpus_load(const char* path, const char* format, seqtag_corpus** out);
SEQTAG_API size_t seqtag_corpus_sentences(const seqtag_corpus* corpus);
SEQTAG_API size_t seqtag_corpus_tokens(const seqtag_corpus* corpus);
/* Writes conll-2col. */
SEQTAG_API seqtag_status seqtag_corpus_save(const seqtag_corpus* corpus, const char* path);
SEQTAG_API void seqtag_corpus_free(seqtag_corpus* corpus);

/* Subcommands; each reads its settings from `config`. */
SEQTAG_API seqtag_status seqtag_stats(const seqtag_config* config, char** report);
SEQTAG_API seqtag_status seqtag_train_tagger(const seqtag_config* config);
SEQTAG_API seqtag_status seqtag_train_detector(const seqtag_config* config);
SEQTAG_API seqtag_status seqtag_predict(const seqtag_config* config);
SEQTAG_API seqtag_status seqtag_evaluate(const seqtag_config* config, char** report);
SEQTAG_API seqtag_status seqtag_synth(const seqtag_config* config);

/* A loaded pipeline can tag many sentences without reloading models. */
SEQTAG_API seqtag_status seqtag_pipeline_open(const seqtag_config* config, seqtag_pipeline** out);
/* Tags whitespace-separated tokens; *tags receives the space-joined tags. */
SEQTAG_API seqtag_status seqtag_pipeline_tag(const seqtag_pipeline* pipeline, const char* tokens, char** tags);
SEQTAG_API void seqtag_pipeline_free(seqtag_pipeline* pipeline);

/* 0 quiet, 1 warnings (default), 2 progress. */
SEQTAG_API void seqtag_set_verbosity(int level);

#ifdef __cplusplus
}
#endif

#endif
