#pragma once

// Independent reference implementations used as test oracles. They favour
// obviousness over speed: plain loops, probability space where safe.

#include <cmath>
#include <cstddef>
#include <limits>
#include <vector>

#include "seqtag/autodiff.hpp"

namespace seqtag::testing {

// All K^T tag sequences in lexicographic order.
inline std::vector<std::vector<std::size_t>> all_sequences(std::size_t steps, std::size_t tags) {
  std::vector<std::vector<std::size_t>> out;
  std::vector<std::size_t> y(steps, 0);
  for (;;) {
    out.push_back(y);
    std::size_t i = steps;
    while (i > 0) {
      --i;
      if (++y[i] < tags) break;
      y[i] = 0;
      if (i == 0) return out;
    }
    if (steps == 0) return out;
  }
}

// Direct sum of Eq.-style chain score with START = K and END = K + 1.
inline double chain_score(const ad::Tensor& p, const ad::Tensor& a, const std::vector<std::size_t>& y) {
  const std::size_t k = p.cols();
  double s = a(k, y.front()) + a(y.back(), k + 1);
  for (std::size_t t = 0; t < y.size(); ++t) s += p(t, y[t]);
  for (std::size_t t = 0; t + 1 < y.size(); ++t) s += a(y[t], y[t + 1]);
  return s;
}

struct Enumeration {
  double log_z = 0.0;
  std::vector<std::size_t> best;
  double best_score = -std::numeric_limits<double>::infinity();
  bool best_unique = true;
  std::vector<double> marginals;  // T x K
};

inline Enumeration enumerate(const ad::Tensor& p, const ad::Tensor& a) {
  const std::size_t steps = p.rows(), k = p.cols();
  const auto seqs = all_sequences(steps, k);
  std::vector<double> scores;
  scores.reserve(seqs.size());
  Enumeration e;
  for (const auto& y : seqs) {
    const double s = chain_score(p, a, y);
    scores.push_back(s);
    if (s > e.best_score) {
      e.best_score = s;
      e.best = y;
      e.best_unique = true;
    } else if (s == e.best_score) {
      e.best_unique = false;
    }
  }
  double total = 0.0;
  for (double s : scores) total += std::exp(s - e.best_score);
  e.log_z = e.best_score + std::log(total);
  e.marginals.assign(steps * k, 0.0);
  for (std::size_t n = 0; n < seqs.size(); ++n) {
    const double prob = std::exp(scores[n] - e.log_z);
    for (std::size_t t = 0; t < steps; ++t) e.marginals[t * k + seqs[n][t]] += prob;
  }
  return e;
}

}  // namespace seqtag::testing
