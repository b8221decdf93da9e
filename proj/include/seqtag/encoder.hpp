#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "seqtag/autodiff.hpp"

namespace seqtag {
class Rng;
}

namespace seqtag::encoder {

// One LSTM direction. Gate blocks are stacked in the order
// [input, forget, cell, output] along the 4h rows.
struct LstmWeights {
  ad::Tensor w_ih;  // 4h x d
  ad::Tensor w_hh;  // 4h x h
  ad::Tensor bias;  // 4h x 1

  std::size_t hidden() const { return w_hh.cols(); }
  std::size_t input() const { return w_ih.cols(); }
};

struct LstmState {
  ad::Tensor h;  // h x 1
  ad::Tensor c;  // h x 1
};

// Registers "<prefix>.w_ih", "<prefix>.w_hh" and "<prefix>.b" in `params`.
LstmWeights add_lstm(ad::ParameterSet& params, const std::string& prefix, std::size_t input,
                     std::size_t hidden, Rng& rng);
LstmWeights lstm_from(const ad::ParameterSet& params, const std::string& prefix);

LstmState zero_state(std::size_t hidden);

LstmState lstm_cell_step(ad::Graph& g, const ad::Tensor& x, const LstmState& prev, const LstmWeights& w);

struct BiLstmWeights {
  LstmWeights forward;
  LstmWeights backward;

  std::size_t hidden() const { return forward.hidden(); }
};

BiLstmWeights add_bilstm(ad::ParameterSet& params, const std::string& prefix, std::size_t input,
                         std::size_t hidden, Rng& rng);
BiLstmWeights bilstm_from(const ad::ParameterSet& params, const std::string& prefix);

// inputs: T x d. Returns T x 2h: row t is [forward h_t ; backward h_t], the
// backward direction reading the sentence right to left.
ad::Tensor bilstm_encode(ad::Graph& g, const ad::Tensor& inputs, const BiLstmWeights& w);

struct EmissionWeights {
  ad::Tensor w_out;  // K x 2h
  ad::Tensor b_out;  // K x 1
};

EmissionWeights add_emission(ad::ParameterSet& params, const std::string& prefix, std::size_t hidden2,
                             std::size_t num_tags, Rng& rng);
EmissionWeights emission_from(const ad::ParameterSet& params, const std::string& prefix);

// Raw per-position tag scores P = H W_out^T + b_out, T x K.
ad::Tensor emission_scores(ad::Graph& g, const ad::Tensor& hidden, const EmissionWeights& w);

}  // namespace seqtag::encoder
