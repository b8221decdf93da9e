#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace seqtag {

struct Corpus;

struct ClassCounts {
  std::size_t tp = 0;
  std::size_t fp = 0;
  std::size_t fn = 0;

  std::size_t support() const { return tp + fn; }
  ClassCounts& operator+=(const ClassCounts& o) {
    tp += o.tp;
    fp += o.fp;
    fn += o.fn;
    return *this;
  }
};

// Token-level counts per bare entity type; O never appears as a class.
struct ConfusionCounts {
  std::map<std::string, ClassCounts> per_class;

  void merge(const ConfusionCounts& other);
  ClassCounts pooled() const;
};

void count_confusion(std::span<const std::string> pred, std::span<const std::string> gold, ConfusionCounts& into);
ConfusionCounts count_confusion(std::span<const std::string> pred, std::span<const std::string> gold);
// Sentence-aligned corpora; tags compared by bare type.
ConfusionCounts count_confusion(const Corpus& pred, const Corpus& gold);

// Empty optional marks a zero denominator.
struct Scores {
  std::optional<double> precision;
  std::optional<double> recall;
  std::optional<double> f1;
};

Scores score(const ClassCounts& c);

// Micro-averaged F1 over pooled counts.
std::optional<double> f1_global(const ConfusionCounts& counts);
double f1_macro(std::span<const double> per_class_f1);
double f1_weighted(std::span<const double> per_class_f1, std::span<const std::size_t> supports);

struct ReportRow {
  std::string label;
  Scores scores;
  std::size_t support = 0;
};

struct Report {
  std::vector<ReportRow> rows;
  std::optional<double> global;
  std::optional<double> weighted;
  std::optional<double> macro;
  // Classes whose F1 was undefined and counted as 0 in the averages.
  std::size_t undefined = 0;

  const ReportRow* find(std::string_view label) const;
  // Mean F1 over `labels` (undefined counts as 0; absent classes are skipped).
  std::optional<double> macro_over(std::span<const std::string> labels) const;
  // Support-weighted F1 over `labels`.
  std::optional<double> weighted_over(std::span<const std::string> labels) const;

  std::string table() const;
  std::string csv() const;  // class,f1,support
};

// Rows for `classes` in the given order; when empty, every type seen in
// either prediction or gold, sorted.
Report make_report(const ConfusionCounts& counts, std::span<const std::string> classes = {});
Report report(const Corpus& pred, const Corpus& gold, std::span<const std::string> classes = {});

}  // namespace seqtag
