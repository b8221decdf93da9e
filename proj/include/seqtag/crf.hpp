#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "seqtag/autodiff.hpp"

// Linear-chain CRF over an emission matrix P (T x K) and a transition matrix
// A ((K+2) x (K+2)), where A[i][j] scores moving from tag i to tag j and the
// last two indices are the START and END sentinels. All dynamic programs run
// in log space.
namespace seqtag::crf {

// Stand-in for -infinity on forbidden sentinel transitions.
inline constexpr double kForbidden = -1e4;

// Zero transitions for K tags, with moves into START and out of END forbidden.
ad::Tensor make_transitions(std::size_t num_tags);

// Restores the forbidden entries after a parameter update.
void mask_sentinels(ad::Tensor& transitions);

// S(X, y) = sum_i A[y_i][y_{i+1}] + sum_i P[i][y_i], with y_0 = START and
// y_{T+1} = END.
ad::Tensor sequence_score(ad::Graph& g, const ad::Tensor& emissions, const ad::Tensor& transitions,
                          std::span<const std::size_t> tags);

// log Z via the forward algorithm.
ad::Tensor log_partition(ad::Graph& g, const ad::Tensor& emissions, const ad::Tensor& transitions);

// -log p(y | X) = log Z - S(X, y).
ad::Tensor nll(ad::Graph& g, const ad::Tensor& emissions, const ad::Tensor& transitions,
               std::span<const std::size_t> tags);

struct ViterbiResult {
  std::vector<std::size_t> tags;
  double score = 0.0;
};

// Highest scoring sequence. Ties resolve to the lowest tag index at every
// backtrack step.
ViterbiResult viterbi(const ad::Tensor& emissions, const ad::Tensor& transitions);

// p(y_t = j | X) as a T x K tensor, by forward-backward.
ad::Tensor posterior_marginals(const ad::Tensor& emissions, const ad::Tensor& transitions);

}  // namespace seqtag::crf
