#include "seqtag/metrics.hpp"

#include <algorithm>
#include <cstdio>
#include <numeric>
#include <sstream>

#include "seqtag/corpus.hpp"
#include "seqtag/errors.hpp"

namespace seqtag {

void ConfusionCounts::merge(const ConfusionCounts& other) {
  for (const auto& [label, c] : other.per_class) per_class[label] += c;
}

ClassCounts ConfusionCounts::pooled() const {
  ClassCounts total;
  for (const auto& [label, c] : per_class) total += c;
  return total;
}

void count_confusion(std::span<const std::string> pred, std::span<const std::string> gold, ConfusionCounts& into) {
  if (pred.size() != gold.size()) {
    throw ContractError("prediction has " + std::to_string(pred.size()) + " tags, gold has " +
                        std::to_string(gold.size()));
  }
  for (std::size_t i = 0; i < pred.size(); ++i) {
    const std::string p(tag_type(pred[i]));
    const std::string g(tag_type(gold[i]));
    if (p == g) {
      if (g != kOutside) ++into.per_class[g].tp;
      continue;
    }
    if (p != kOutside) ++into.per_class[p].fp;
    if (g != kOutside) ++into.per_class[g].fn;
  }
}

ConfusionCounts count_confusion(std::span<const std::string> pred, std::span<const std::string> gold) {
  ConfusionCounts counts;
  count_confusion(pred, gold, counts);
  return counts;
}

ConfusionCounts count_confusion(const Corpus& pred, const Corpus& gold) {
  if (pred.size() != gold.size()) {
    throw ContractError("prediction has " + std::to_string(pred.size()) + " sentences, gold has " +
                        std::to_string(gold.size()));
  }
  ConfusionCounts counts;
  std::vector<std::string> p, g;
  for (std::size_t s = 0; s < pred.size(); ++s) {
    p.clear();
    g.clear();
    for (const auto& t : pred.sentences[s].tokens) p.push_back(t.tag);
    for (const auto& t : gold.sentences[s].tokens) g.push_back(t.tag);
    if (p.size() != g.size()) {
      throw ContractError("sentence " + std::to_string(s) + " length differs between prediction and gold");
    }
    count_confusion(p, g, counts);
  }
  return counts;
}

Scores score(const ClassCounts& c) {
  Scores s;
  if (c.tp + c.fp > 0) s.precision = static_cast<double>(c.tp) / static_cast<double>(c.tp + c.fp);
  if (c.tp + c.fn > 0) s.recall = static_cast<double>(c.tp) / static_cast<double>(c.tp + c.fn);
  if (s.precision && s.recall) {
    const double denom = *s.precision + *s.recall;
    s.f1 = denom > 0.0 ? 2.0 * *s.precision * *s.recall / denom : 0.0;
  }
  return s;
}

std::optional<double> f1_global(const ConfusionCounts& counts) { return score(counts.pooled()).f1; }

double f1_macro(std::span<const double> per_class_f1) {
  if (per_class_f1.empty()) throw DomainError("macro average over no classes");
  return std::accumulate(per_class_f1.begin(), per_class_f1.end(), 0.0) / static_cast<double>(per_class_f1.size());
}

double f1_weighted(std::span<const double> per_class_f1, std::span<const std::size_t> supports) {
  if (per_class_f1.size() != supports.size()) throw ContractError("F1 and support lists differ in length");
  double num = 0.0;
  std::size_t total = 0;
  for (std::size_t i = 0; i < supports.size(); ++i) {
    num += static_cast<double>(supports[i]) * per_class_f1[i];
    total += supports[i];
  }
  if (total == 0) throw DomainError("weighted average with zero total support");
  return num / static_cast<double>(total);
}

const ReportRow* Report::find(std::string_view label) const {
  for (const auto& r : rows)
    if (r.label == label) return &r;
  return nullptr;
}

std::optional<double> Report::macro_over(std::span<const std::string> labels) const {
  std::vector<double> f1;
  for (const auto& l : labels)
    if (const auto* r = find(l)) f1.push_back(r->scores.f1.value_or(0.0));
  if (f1.empty()) return std::nullopt;
  return f1_macro(f1);
}

std::optional<double> Report::weighted_over(std::span<const std::string> labels) const {
  std::vector<double> f1;
  std::vector<std::size_t> n;
  for (const auto& l : labels) {
    if (const auto* r = find(l)) {
      f1.push_back(r->scores.f1.value_or(0.0));
      n.push_back(r->support);
    }
  }
  if (std::accumulate(n.begin(), n.end(), std::size_t{0}) == 0) return std::nullopt;
  return f1_weighted(f1, n);
}

namespace {

std::string fmt(const std::optional<double>& v) {
  if (!v) return "undef";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4f", *v);
  return buf;
}

}  // namespace

std::string Report::table() const {
  std::size_t width = std::string_view("Weighted Average").size();
  for (const auto& r : rows) width = std::max(width, r.label.size());
  std::ostringstream out;
  auto line = [&](const std::string& label, const std::string& f1, const std::string& support) {
    out << "| " << label << std::string(width - label.size(), ' ') << " | " << std::string(7 - std::min<std::size_t>(7, f1.size()), ' ') << f1
        << " | " << std::string(9 - std::min<std::size_t>(9, support.size()), ' ') << support << " |\n";
  };
  std::size_t total = 0;
  for (const auto& r : rows) total += r.support;
  out << "# token-level F1 by entity type; class O excluded from all rows\n";
  line("Class", "F1", "Support");
  for (const auto& r : rows) line(r.label, fmt(r.scores.f1), std::to_string(r.support));
  line("All classes", fmt(global), std::to_string(total));
  line("Weighted Average", fmt(weighted), std::to_string(total));
  line("Macro Average", fmt(macro), std::to_string(total));
  out << "# undefined F1 (counted as 0 in averages): " << undefined << " class(es)\n";
  return out.str();
}

std::string Report::csv() const {
  std::ostringstream out;
  std::size_t total = 0;
  for (const auto& r : rows) total += r.support;
  out << "class,f1,support\n";
  for (const auto& r : rows) out << r.label << ',' << fmt(r.scores.f1) << ',' << r.support << '\n';
  out << "All classes," << fmt(global) << ',' << total << '\n';
  out << "Weighted Average," << fmt(weighted) << ',' << total << '\n';
  out << "Macro Average," << fmt(macro) << ',' << total << '\n';
  return out.str();
}

Report make_report(const ConfusionCounts& counts, std::span<const std::string> classes) {
  std::vector<std::string> labels(classes.begin(), classes.end());
  if (labels.empty()) {
    for (const auto& [label, c] : counts.per_class) labels.push_back(label);
  }
  Report rep;
  std::vector<double> f1;
  std::vector<std::size_t> n;
  ConfusionCounts selected;
  for (const auto& label : labels) {
    auto it = counts.per_class.find(label);
    const ClassCounts c = it == counts.per_class.end() ? ClassCounts{} : it->second;
    selected.per_class[label] = c;
    ReportRow row{label, score(c), c.support()};
    if (!row.scores.f1) ++rep.undefined;
    f1.push_back(row.scores.f1.value_or(0.0));
    n.push_back(row.support);
    rep.rows.push_back(std::move(row));
  }
  rep.global = f1_global(selected);
  if (!f1.empty()) rep.macro = f1_macro(f1);
  if (std::accumulate(n.begin(), n.end(), std::size_t{0}) > 0) rep.weighted = f1_weighted(f1, n);
  return rep;
}

Report report(const Corpus& pred, const Corpus& gold, std::span<const std::string> classes) {
  return make_report(count_confusion(pred, gold), classes);
}

}  // namespace seqtag
