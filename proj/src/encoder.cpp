#include "seqtag/encoder.hpp"

#include "seqtag/errors.hpp"
#include "seqtag/rng.hpp"

namespace seqtag::encoder {

LstmWeights add_lstm(ad::ParameterSet& params, const std::string& prefix, std::size_t input,
                     std::size_t hidden, Rng& rng) {
  auto w_ih = ad::Tensor::zeros({4 * hidden, input});
  auto w_hh = ad::Tensor::zeros({4 * hidden, hidden});
  ad::init_uniform(w_ih, rng, input, 4 * hidden);
  ad::init_uniform(w_hh, rng, hidden, 4 * hidden);
  LstmWeights w;
  w.w_ih = params.add(prefix + ".w_ih", w_ih);
  w.w_hh = params.add(prefix + ".w_hh", w_hh);
  w.bias = params.add(prefix + ".b", ad::Tensor::zeros({4 * hidden, 1}));
  return w;
}

LstmWeights lstm_from(const ad::ParameterSet& params, const std::string& prefix) {
  LstmWeights w{params.get(prefix + ".w_ih"), params.get(prefix + ".w_hh"), params.get(prefix + ".b")};
  const std::size_t h = w.w_hh.cols();
  if (w.w_hh.rows() != 4 * h || w.w_ih.rows() != 4 * h || w.bias.size() != 4 * h) {
    throw DimensionError("inconsistent LSTM parameter shapes under '" + prefix + "'");
  }
  return w;
}

LstmState zero_state(std::size_t hidden) {
  return LstmState{ad::Tensor::zeros({hidden, 1}), ad::Tensor::zeros({hidden, 1})};
}

LstmState lstm_cell_step(ad::Graph& g, const ad::Tensor& x, const LstmState& prev, const LstmWeights& w) {
  const std::size_t h = w.hidden();
  if (x.size() != w.input() || prev.h.size() != h || prev.c.size() != h) {
    throw DimensionError("lstm step: input " + ad::shape_string(x.shape()) + ", state " +
                         ad::shape_string(prev.h.shape()) + " vs weights " + ad::shape_string(w.w_ih.shape()));
  }
  auto gates = ad::add(g, ad::add(g, ad::matmul(g, w.w_ih, x), ad::matmul(g, w.w_hh, prev.h)), w.bias);
  auto i = ad::sigmoid(g, ad::slice_rows(g, gates, 0, h));
  auto f = ad::sigmoid(g, ad::slice_rows(g, gates, h, 2 * h));
  auto c_hat = ad::tanh(g, ad::slice_rows(g, gates, 2 * h, 3 * h));
  auto o = ad::sigmoid(g, ad::slice_rows(g, gates, 3 * h, 4 * h));
  auto c = ad::add(g, ad::mul(g, f, prev.c), ad::mul(g, i, c_hat));
  auto hn = ad::mul(g, o, ad::tanh(g, c));
  return LstmState{hn, c};
}

BiLstmWeights add_bilstm(ad::ParameterSet& params, const std::string& prefix, std::size_t input,
                         std::size_t hidden, Rng& rng) {
  auto fwd = add_lstm(params, prefix + ".fwd", input, hidden, rng);
  auto bwd = add_lstm(params, prefix + ".bwd", input, hidden, rng);
  return BiLstmWeights{fwd, bwd};
}

BiLstmWeights bilstm_from(const ad::ParameterSet& params, const std::string& prefix) {
  return BiLstmWeights{lstm_from(params, prefix + ".fwd"), lstm_from(params, prefix + ".bwd")};
}

ad::Tensor bilstm_encode(ad::Graph& g, const ad::Tensor& inputs, const BiLstmWeights& w) {
  const std::size_t steps = inputs.rows();
  if (steps == 0) throw DomainError("bilstm over an empty sequence");
  if (inputs.cols() != w.forward.input()) {
    throw DimensionError("bilstm input " + ad::shape_string(inputs.shape()) + " vs weights " +
                         ad::shape_string(w.forward.w_ih.shape()));
  }
  std::vector<ad::Tensor> columns;
  columns.reserve(steps);
  for (std::size_t t = 0; t < steps; ++t) {
    auto row = ad::slice_rows(g, inputs, t, t + 1);
    columns.push_back(ad::transpose(g, row));
  }
  const std::size_t h = w.hidden();
  std::vector<ad::Tensor> fwd(steps), bwd(steps);
  LstmState state = zero_state(h);
  for (std::size_t t = 0; t < steps; ++t) {
    state = lstm_cell_step(g, columns[t], state, w.forward);
    fwd[t] = state.h;
  }
  state = zero_state(h);
  for (std::size_t t = steps; t-- > 0;) {
    state = lstm_cell_step(g, columns[t], state, w.backward);
    bwd[t] = state.h;
  }
  std::vector<ad::Tensor> rows;
  rows.reserve(steps);
  for (std::size_t t = 0; t < steps; ++t) {
    const ad::Tensor pair[] = {fwd[t], bwd[t]};
    rows.push_back(ad::concat_rows(g, pair));
  }
  return ad::stack_rows(g, rows);
}

EmissionWeights add_emission(ad::ParameterSet& params, const std::string& prefix, std::size_t hidden2,
                             std::size_t num_tags, Rng& rng) {
  auto w = ad::Tensor::zeros({num_tags, hidden2});
  ad::init_uniform(w, rng, hidden2, num_tags);
  EmissionWeights e;
  e.w_out = params.add(prefix + ".w", w);
  e.b_out = params.add(prefix + ".b", ad::Tensor::zeros({num_tags, 1}));
  return e;
}

EmissionWeights emission_from(const ad::ParameterSet& params, const std::string& prefix) {
  return EmissionWeights{params.get(prefix + ".w"), params.get(prefix + ".b")};
}

ad::Tensor emission_scores(ad::Graph& g, const ad::Tensor& hidden, const EmissionWeights& w) {
  if (hidden.cols() != w.w_out.cols()) {
    throw DimensionError("emission: hidden " + ad::shape_string(hidden.shape()) + " vs projection " +
                         ad::shape_string(w.w_out.shape()));
  }
  return ad::add_row_bias(g, ad::matmul(g, hidden, ad::transpose(g, w.w_out)), w.b_out);
}

}  // namespace seqtag::encoder
