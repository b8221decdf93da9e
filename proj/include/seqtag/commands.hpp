#pragma once

#include <string>

#include "seqtag/config.hpp"

// One function per CLI subcommand. Each reads its settings from a Config and
// writes its artifacts; every file written and every returned report starts
// with the output_header line.
namespace seqtag::commands {

// Keys: input, format, count (tokens|mentions), strong, weak, out.
std::string stats(const Config& config);

// Keys: train, val, embeddings, emb_dim, keep, hidden, lr, clip, epochs, seed,
// flagged_only, strong, weak, format, out (checkpoint), log.
void train_tagger(const Config& config);

// Keys: train, val, embeddings, emb_dim, hidden, widths, filters, lr, clip,
// epochs, seed, weighted, balanced, strong, weak, format, out, log.
void train_detector(const Config& config);

// Keys: mode, checkpoint.*, embeddings, emb_dim, threshold, input, format,
// output, threads.
void predict(const Config& config);

// Keys: pred, gold, format, strong, weak, csv, out.
std::string evaluate(const Config& config);

// Keys: out_dir plus the SynthSpec keys.
void synth(const Config& config);

}  // namespace seqtag::commands
