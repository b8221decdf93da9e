#include "seqtag/crf.hpp"

#include <cmath>

#include "seqtag/errors.hpp"

namespace seqtag::crf {

namespace {

struct Dims {
  std::size_t steps;
  std::size_t tags;
  std::size_t start;
  std::size_t end;
  std::size_t width;  // row stride of A
};

Dims check(const ad::Tensor& p, const ad::Tensor& a) {
  if (p.rank() != 2) throw DimensionError("emissions must be T x K, got " + ad::shape_string(p.shape()));
  const std::size_t k = p.cols();
  if (a.rank() != 2 || a.rows() != k + 2 || a.cols() != k + 2) {
    throw DimensionError("transitions " + ad::shape_string(a.shape()) + " do not match emissions " +
                         ad::shape_string(p.shape()));
  }
  if (p.rows() == 0) throw DomainError("CRF over an empty sequence");
  return Dims{p.rows(), k, k, k + 1, k + 2};
}

double lse(const double* x, std::size_t n) { return ad::log_sum_exp(std::span<const double>(x, n)); }

// Forward and backward log-potentials for one sentence.
struct Lattice {
  Dims d;
  std::vector<double> alpha;  // T x K
  std::vector<double> beta;   // T x K
  double log_z = 0.0;

  Lattice(const ad::Tensor& p, const ad::Tensor& a, bool with_beta) : d(check(p, a)) {
    const auto P = p.values().data();
    const auto A = a.values().data();
    const std::size_t T = d.steps, K = d.tags, W = d.width;
    alpha.assign(T * K, 0.0);
    std::vector<double> buf(K);
    for (std::size_t j = 0; j < K; ++j) alpha[j] = A[d.start * W + j] + P[j];
    for (std::size_t t = 1; t < T; ++t) {
      for (std::size_t j = 0; j < K; ++j) {
        for (std::size_t i = 0; i < K; ++i) buf[i] = alpha[(t - 1) * K + i] + A[i * W + j];
        alpha[t * K + j] = lse(buf.data(), K) + P[t * K + j];
      }
    }
    for (std::size_t j = 0; j < K; ++j) buf[j] = alpha[(T - 1) * K + j] + A[j * W + d.end];
    log_z = lse(buf.data(), K);
    if (!with_beta) return;
    beta.assign(T * K, 0.0);
    for (std::size_t i = 0; i < K; ++i) beta[(T - 1) * K + i] = A[i * W + d.end];
    for (std::size_t t = T - 1; t-- > 0;) {
      for (std::size_t i = 0; i < K; ++i) {
        for (std::size_t j = 0; j < K; ++j) buf[j] = A[i * W + j] + P[(t + 1) * K + j] + beta[(t + 1) * K + j];
        beta[t * K + i] = lse(buf.data(), K);
      }
    }
  }

  double marginal(std::size_t t, std::size_t j) const {
    return std::exp(alpha[t * d.tags + j] + beta[t * d.tags + j] - log_z);
  }
};

}  // namespace

ad::Tensor make_transitions(std::size_t num_tags) {
  auto a = ad::Tensor::zeros({num_tags + 2, num_tags + 2});
  mask_sentinels(a);
  return a;
}

void mask_sentinels(ad::Tensor& transitions) {
  const std::size_t w = transitions.cols();
  const std::size_t start = w - 2, end = w - 1;
  auto v = transitions.mutable_values();
  for (std::size_t i = 0; i < w; ++i) {
    v[i * w + start] = kForbidden;
    v[end * w + i] = kForbidden;
  }
}

ad::Tensor sequence_score(ad::Graph& g, const ad::Tensor& emissions, const ad::Tensor& transitions,
                          std::span<const std::size_t> tags) {
  const Dims d = check(emissions, transitions);
  if (tags.size() != d.steps) {
    throw ContractError("tag sequence of length " + std::to_string(tags.size()) + " for " +
                        std::to_string(d.steps) + " positions");
  }
  for (auto y : tags) {
    if (y >= d.tags) throw DomainError("tag index " + std::to_string(y) + " outside [0, " + std::to_string(d.tags) + ")");
  }
  const auto P = emissions.values();
  const auto A = transitions.values();
  double score = A[d.start * d.width + tags[0]] + A[tags.back() * d.width + d.end];
  for (std::size_t t = 0; t < d.steps; ++t) {
    score += P[t * d.tags + tags[t]];
    if (t + 1 < d.steps) score += A[tags[t] * d.width + tags[t + 1]];
  }
  ad::Tensor result = ad::Tensor::scalar(score, g.tracks({&emissions, &transitions}));
  if (result.requires_grad()) {
    std::vector<std::size_t> y(tags.begin(), tags.end());
    g.record({emissions, transitions}, result, [p = emissions, a = transitions, result, y = std::move(y), d]() mutable {
      const double go = result.grad()[0];
      if (p.requires_grad()) {
        auto gp = p.mutable_grad();
        for (std::size_t t = 0; t < d.steps; ++t) gp[t * d.tags + y[t]] += go;
      }
      if (a.requires_grad()) {
        auto ga = a.mutable_grad();
        ga[d.start * d.width + y[0]] += go;
        ga[y.back() * d.width + d.end] += go;
        for (std::size_t t = 0; t + 1 < d.steps; ++t) ga[y[t] * d.width + y[t + 1]] += go;
      }
    });
  }
  return result;
}

ad::Tensor log_partition(ad::Graph& g, const ad::Tensor& emissions, const ad::Tensor& transitions) {
  const bool tracked = g.tracks({&emissions, &transitions});
  Lattice lattice(emissions, transitions, false);
  ad::Tensor result = ad::Tensor::scalar(lattice.log_z, tracked);
  if (tracked) {
    g.record({emissions, transitions}, result, [p = emissions, a = transitions, result]() mutable {
      const double go = result.grad()[0];
      Lattice full(p, a, true);
      const Dims& d = full.d;
      const std::size_t T = d.steps, K = d.tags, W = d.width;
      if (p.requires_grad()) {
        auto gp = p.mutable_grad();
        for (std::size_t t = 0; t < T; ++t)
          for (std::size_t j = 0; j < K; ++j) gp[t * K + j] += go * full.marginal(t, j);
      }
      if (a.requires_grad()) {
        auto ga = a.mutable_grad();
        const auto P = p.values();
        const auto A = a.values();
        for (std::size_t j = 0; j < K; ++j) {
          ga[d.start * W + j] += go * full.marginal(0, j);
          ga[j * W + d.end] += go * full.marginal(T - 1, j);
        }
        for (std::size_t t = 0; t + 1 < T; ++t) {
          for (std::size_t i = 0; i < K; ++i) {
            const double left = full.alpha[t * K + i] - full.log_z;
            for (std::size_t j = 0; j < K; ++j) {
              const double pair = left + A[i * W + j] + P[(t + 1) * K + j] + full.beta[(t + 1) * K + j];
              ga[i * W + j] += go * std::exp(pair);
            }
          }
        }
      }
    });
  }
  return result;
}

ad::Tensor nll(ad::Graph& g, const ad::Tensor& emissions, const ad::Tensor& transitions,
               std::span<const std::size_t> tags) {
  auto score = sequence_score(g, emissions, transitions, tags);
  auto log_z = log_partition(g, emissions, transitions);
  return ad::sub(g, log_z, score);
}

ViterbiResult viterbi(const ad::Tensor& emissions, const ad::Tensor& transitions) {
  const Dims d = check(emissions, transitions);
  const auto P = emissions.values().data();
  const auto A = transitions.values().data();
  const std::size_t T = d.steps, K = d.tags, W = d.width;
  std::vector<double> best(T * K);
  std::vector<std::size_t> back(T * K, 0);
  for (std::size_t j = 0; j < K; ++j) best[j] = A[d.start * W + j] + P[j];
  for (std::size_t t = 1; t < T; ++t) {
    for (std::size_t j = 0; j < K; ++j) {
      std::size_t arg = 0;
      double top = best[(t - 1) * K] + A[j];
      for (std::size_t i = 1; i < K; ++i) {
        const double v = best[(t - 1) * K + i] + A[i * W + j];
        if (v > top) {
          top = v;
          arg = i;
        }
      }
      best[t * K + j] = top + P[t * K + j];
      back[t * K + j] = arg;
    }
  }
  std::size_t last = 0;
  double top = best[(T - 1) * K] + A[d.end];
  for (std::size_t j = 1; j < K; ++j) {
    const double v = best[(T - 1) * K + j] + A[j * W + d.end];
    if (v > top) {
      top = v;
      last = j;
    }
  }
  ViterbiResult result;
  result.score = top;
  result.tags.resize(T);
  result.tags[T - 1] = last;
  for (std::size_t t = T - 1; t > 0; --t) result.tags[t - 1] = back[t * K + result.tags[t]];
  return result;
}

ad::Tensor posterior_marginals(const ad::Tensor& emissions, const ad::Tensor& transitions) {
  Lattice lattice(emissions, transitions, true);
  const std::size_t T = lattice.d.steps, K = lattice.d.tags;
  std::vector<double> m(T * K);
  for (std::size_t t = 0; t < T; ++t)
    for (std::size_t j = 0; j < K; ++j) m[t * K + j] = lattice.marginal(t, j);
  return ad::Tensor::matrix(T, K, std::move(m));
}

}  // namespace seqtag::crf
