#include "seqtag/autodiff.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "seqtag/errors.hpp"
#include "seqtag/rng.hpp"

namespace seqtag::ad {

std::string shape_string(const Shape& shape) {
  std::string out = "[";
  for (std::size_t i = 0; i < shape.size(); ++i) {
    if (i) out += "x";
    out += std::to_string(shape[i]);
  }
  return out + "]";
}

namespace {

std::size_t shape_product(const Shape& shape) {
  return std::accumulate(shape.begin(), shape.end(), std::size_t{1}, std::multiplies<>());
}

void accumulate(std::span<double> dst, std::span<const double> src) {
  for (std::size_t i = 0; i < dst.size(); ++i) dst[i] += src[i];
}

}  // namespace

// ---------------------------------------------------------------------------
// Tensor

Tensor::Tensor(Shape shape, std::vector<double> values, bool requires_grad)
    : data_(std::make_shared<TensorData>()) {
  if (shape_product(shape) != values.size()) {
    throw DimensionError("tensor shape " + shape_string(shape) + " does not hold " +
                         std::to_string(values.size()) + " values");
  }
  data_->shape = std::move(shape);
  data_->values = std::move(values);
  data_->requires_grad = requires_grad;
}

Tensor Tensor::zeros(Shape shape, bool requires_grad) {
  const auto n = shape_product(shape);
  return Tensor(std::move(shape), std::vector<double>(n, 0.0), requires_grad);
}

Tensor Tensor::scalar(double value, bool requires_grad) {
  return Tensor({1}, {value}, requires_grad);
}

Tensor Tensor::column(std::vector<double> values, bool requires_grad) {
  const auto n = values.size();
  return Tensor({n, 1}, std::move(values), requires_grad);
}

Tensor Tensor::matrix(std::size_t rows, std::size_t cols, std::vector<double> values,
                      bool requires_grad) {
  return Tensor({rows, cols}, std::move(values), requires_grad);
}

std::size_t Tensor::rows() const { return rank() == 0 ? 1 : shape()[0]; }

std::size_t Tensor::cols() const { return rank() >= 2 ? shape()[1] : 1; }

double Tensor::item() const {
  if (size() != 1) {
    throw ContractError("item() on tensor of shape " + shape_string(shape()));
  }
  return data_->values[0];
}

std::span<double> Tensor::mutable_grad() const {
  if (data_->grad.size() != data_->values.size()) data_->grad.assign(data_->values.size(), 0.0);
  return data_->grad;
}

void Tensor::zero_grad() {
  if (!data_->grad.empty()) std::fill(data_->grad.begin(), data_->grad.end(), 0.0);
}

Tensor Tensor::clone() const {
  Tensor t(data_->shape, data_->values, data_->requires_grad);
  t.data_->grad = data_->grad;
  return t;
}

Tensor Tensor::detach() const { return Tensor(data_->shape, data_->values, false); }

// ---------------------------------------------------------------------------
// Graph

bool Graph::tracks(std::initializer_list<const Tensor*> inputs) const {
  if (!recording()) return false;
  return std::any_of(inputs.begin(), inputs.end(), [](const Tensor* t) { return t->requires_grad(); });
}

bool Graph::tracks(std::span<const Tensor> inputs) const {
  if (!recording()) return false;
  return std::any_of(inputs.begin(), inputs.end(), [](const Tensor& t) { return t.requires_grad(); });
}

void Graph::record(std::vector<Tensor> inputs, Tensor output, std::function<void()> propagate) {
  nodes_.push_back(Node{std::move(inputs), std::move(output), std::move(propagate)});
}

void Graph::backward(const Tensor& loss) {
  if (loss.size() != 1) {
    throw ContractError("backward requires a scalar loss, got shape " + shape_string(loss.shape()));
  }
  for (auto& node : nodes_) {
    node.output.mutable_grad();
    node.output.zero_grad();
    for (auto& in : node.inputs) {
      if (in.requires_grad()) {
        in.mutable_grad();
        in.zero_grad();
      }
    }
  }
  if (!loss.requires_grad()) return;
  Tensor seed = loss;
  seed.mutable_grad()[0] = 1.0;
  for (auto it = nodes_.rbegin(); it != nodes_.rend(); ++it) it->propagate();
}

// ---------------------------------------------------------------------------
// Elementwise

namespace {

enum class Broadcast { none, left_scalar, right_scalar };

Broadcast check_binary(const Tensor& a, const Tensor& b, const char* op) {
  if (a.shape() == b.shape()) return Broadcast::none;
  if (b.size() == 1) return Broadcast::right_scalar;
  if (a.size() == 1) return Broadcast::left_scalar;
  throw DimensionError(std::string(op) + ": incompatible shapes " + shape_string(a.shape()) +
                       " and " + shape_string(b.shape()));
}

template <typename Fwd, typename DA, typename DB>
Tensor binary(Graph& g, const Tensor& a, const Tensor& b, const char* name, Fwd fwd, DA da, DB db) {
  const auto mode = check_binary(a, b, name);
  const Tensor& big = mode == Broadcast::left_scalar ? b : a;
  const std::size_t n = big.size();
  auto av = a.values();
  auto bv = b.values();
  auto ia = [&, mode](std::size_t i) { return mode == Broadcast::left_scalar ? 0 : i; };
  auto ib = [&, mode](std::size_t i) { return mode == Broadcast::right_scalar ? 0 : i; };
  std::vector<double> out(n);
  for (std::size_t i = 0; i < n; ++i) out[i] = fwd(av[ia(i)], bv[ib(i)]);
  Tensor result(big.shape(), std::move(out), g.tracks({&a, &b}));
  if (result.requires_grad()) {
    g.record({a, b}, result, [a, b, result, mode, da, db]() mutable {
      auto go = result.grad();
      auto av = a.values();
      auto bv = b.values();
      const std::size_t n = go.size();
      for (std::size_t i = 0; i < n; ++i) {
        const std::size_t i_a = mode == Broadcast::left_scalar ? 0 : i;
        const std::size_t i_b = mode == Broadcast::right_scalar ? 0 : i;
        if (a.requires_grad()) a.mutable_grad()[i_a] += go[i] * da(av[i_a], bv[i_b]);
        if (b.requires_grad()) b.mutable_grad()[i_b] += go[i] * db(av[i_a], bv[i_b]);
      }
    });
  }
  return result;
}

// `deriv` receives (input, output).
template <typename Fwd, typename Deriv>
Tensor unary(Graph& g, const Tensor& x, Fwd fwd, Deriv deriv) {
  auto xv = x.values();
  std::vector<double> out(xv.size());
  for (std::size_t i = 0; i < xv.size(); ++i) out[i] = fwd(xv[i]);
  Tensor result(x.shape(), std::move(out), g.tracks({&x}));
  if (result.requires_grad()) {
    g.record({x}, result, [x, result, deriv]() mutable {
      auto go = result.grad();
      auto xv = x.values();
      auto yv = result.values();
      auto gx = x.mutable_grad();
      for (std::size_t i = 0; i < go.size(); ++i) gx[i] += go[i] * deriv(xv[i], yv[i]);
    });
  }
  return result;
}

double stable_sigmoid(double x) {
  if (x >= 0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

}  // namespace

Tensor add(Graph& g, const Tensor& a, const Tensor& b) {
  return binary(
      g, a, b, "add", [](double x, double y) { return x + y; }, [](double, double) { return 1.0; },
      [](double, double) { return 1.0; });
}

Tensor sub(Graph& g, const Tensor& a, const Tensor& b) {
  return binary(
      g, a, b, "sub", [](double x, double y) { return x - y; }, [](double, double) { return 1.0; },
      [](double, double) { return -1.0; });
}

Tensor mul(Graph& g, const Tensor& a, const Tensor& b) {
  return binary(
      g, a, b, "mul", [](double x, double y) { return x * y; }, [](double, double y) { return y; },
      [](double x, double) { return x; });
}

Tensor scale(Graph& g, const Tensor& a, double factor) {
  return unary(
      g, a, [factor](double x) { return factor * x; }, [factor](double, double) { return factor; });
}

Tensor sigmoid(Graph& g, const Tensor& x) {
  return unary(g, x, stable_sigmoid, [](double, double y) { return y * (1.0 - y); });
}

Tensor tanh(Graph& g, const Tensor& x) {
  return unary(
      g, x, [](double v) { return std::tanh(v); }, [](double, double y) { return 1.0 - y * y; });
}

Tensor relu(Graph& g, const Tensor& x) {
  return unary(
      g, x, [](double v) { return v > 0.0 ? v : 0.0; },
      [](double v, double) { return v > 0.0 ? 1.0 : 0.0; });
}

Tensor elementwise(Graph& g, ElementwiseOp op, std::span<const Tensor> inputs) {
  const bool is_binary = op == ElementwiseOp::add || op == ElementwiseOp::sub || op == ElementwiseOp::mul;
  const std::size_t arity = is_binary ? 2 : 1;
  if (inputs.size() != arity) {
    throw ContractError("elementwise op expects " + std::to_string(arity) + " inputs, got " +
                        std::to_string(inputs.size()));
  }
  switch (op) {
    case ElementwiseOp::add: return add(g, inputs[0], inputs[1]);
    case ElementwiseOp::sub: return sub(g, inputs[0], inputs[1]);
    case ElementwiseOp::mul: return mul(g, inputs[0], inputs[1]);
    case ElementwiseOp::sigmoid: return sigmoid(g, inputs[0]);
    case ElementwiseOp::tanh: return tanh(g, inputs[0]);
    case ElementwiseOp::relu: return relu(g, inputs[0]);
  }
  throw ContractError("unknown elementwise op");
}

// ---------------------------------------------------------------------------
// Linear algebra

namespace {

// c[m x n] += a[m x k] * b[k x n]
void gemm_nn(std::size_t m, std::size_t k, std::size_t n, const double* a, const double* b, double* c) {
  for (std::size_t i = 0; i < m; ++i) {
    double* ci = c + i * n;
    for (std::size_t p = 0; p < k; ++p) {
      const double aip = a[i * k + p];
      if (aip == 0.0) continue;
      const double* bp = b + p * n;
      for (std::size_t j = 0; j < n; ++j) ci[j] += aip * bp[j];
    }
  }
}

}  // namespace

Tensor matmul(Graph& g, const Tensor& a, const Tensor& b) {
  if (a.rank() > 2 || b.rank() > 2 || a.cols() != b.rows()) {
    throw DimensionError("matmul: inner dimensions disagree for " + shape_string(a.shape()) + " x " +
                         shape_string(b.shape()));
  }
  const std::size_t m = a.rows(), k = a.cols(), n = b.cols();
  std::vector<double> out(m * n, 0.0);
  gemm_nn(m, k, n, a.values().data(), b.values().data(), out.data());
  Tensor result({m, n}, std::move(out), g.tracks({&a, &b}));
  if (result.requires_grad()) {
    g.record({a, b}, result, [a, b, result, m, k, n]() mutable {
      const double* go = result.grad().data();
      if (a.requires_grad()) {
        // dA = dC * B^T
        double* ga = a.mutable_grad().data();
        const double* bv = b.values().data();
        for (std::size_t i = 0; i < m; ++i) {
          for (std::size_t p = 0; p < k; ++p) {
            double acc = 0.0;
            for (std::size_t j = 0; j < n; ++j) acc += go[i * n + j] * bv[p * n + j];
            ga[i * k + p] += acc;
          }
        }
      }
      if (b.requires_grad()) {
        // dB = A^T * dC
        double* gb = b.mutable_grad().data();
        const double* av = a.values().data();
        for (std::size_t i = 0; i < m; ++i) {
          for (std::size_t p = 0; p < k; ++p) {
            const double aip = av[i * k + p];
            if (aip == 0.0) continue;
            for (std::size_t j = 0; j < n; ++j) gb[p * n + j] += aip * go[i * n + j];
          }
        }
      }
    });
  }
  return result;
}

Tensor transpose(Graph& g, const Tensor& a) {
  if (a.rank() > 2) throw DimensionError("transpose: rank > 2 " + shape_string(a.shape()));
  const std::size_t r = a.rows(), c = a.cols();
  auto av = a.values();
  std::vector<double> out(r * c);
  for (std::size_t i = 0; i < r; ++i)
    for (std::size_t j = 0; j < c; ++j) out[j * r + i] = av[i * c + j];
  Tensor result({c, r}, std::move(out), g.tracks({&a}));
  if (result.requires_grad()) {
    g.record({a}, result, [a, result, r, c]() mutable {
      auto go = result.grad();
      auto ga = a.mutable_grad();
      for (std::size_t i = 0; i < r; ++i)
        for (std::size_t j = 0; j < c; ++j) ga[i * c + j] += go[j * r + i];
    });
  }
  return result;
}

Tensor add_row_bias(Graph& g, const Tensor& m, const Tensor& bias) {
  const std::size_t rows = m.rows(), cols = m.cols();
  if (bias.size() != cols) {
    throw DimensionError("add_row_bias: bias " + shape_string(bias.shape()) + " vs matrix " +
                         shape_string(m.shape()));
  }
  auto mv = m.values();
  auto bv = bias.values();
  std::vector<double> out(mv.begin(), mv.end());
  for (std::size_t i = 0; i < rows; ++i)
    for (std::size_t j = 0; j < cols; ++j) out[i * cols + j] += bv[j];
  Tensor result(m.shape(), std::move(out), g.tracks({&m, &bias}));
  if (result.requires_grad()) {
    g.record({m, bias}, result, [m, bias, result, rows, cols]() mutable {
      auto go = result.grad();
      if (m.requires_grad()) accumulate(m.mutable_grad(), go);
      if (bias.requires_grad()) {
        auto gb = bias.mutable_grad();
        for (std::size_t i = 0; i < rows; ++i)
          for (std::size_t j = 0; j < cols; ++j) gb[j] += go[i * cols + j];
      }
    });
  }
  return result;
}

// ---------------------------------------------------------------------------
// Reductions

Tensor sum(Graph& g, const Tensor& x) {
  auto xv = x.values();
  Tensor result = Tensor::scalar(std::accumulate(xv.begin(), xv.end(), 0.0), g.tracks({&x}));
  if (result.requires_grad()) {
    g.record({x}, result, [x, result]() mutable {
      const double go = result.grad()[0];
      for (auto& v : x.mutable_grad()) v += go;
    });
  }
  return result;
}

double log_sum_exp(std::span<const double> x) {
  if (x.empty()) throw DomainError("log_sum_exp over an empty axis");
  const double mx = *std::max_element(x.begin(), x.end());
  if (std::isinf(mx)) return mx;
  double acc = 0.0;
  for (double v : x) acc += std::exp(v - mx);
  return mx + std::log(acc);
}

Tensor log_sum_exp(Graph& g, const Tensor& x, std::size_t axis) {
  if (x.rank() > 2 || axis > 1) throw DimensionError("log_sum_exp: unsupported axis/shape " + shape_string(x.shape()));
  const std::size_t rows = x.rows(), cols = x.cols();
  const bool over_rows = axis == 0;
  const std::size_t outer = over_rows ? cols : rows;
  const std::size_t inner = over_rows ? rows : cols;
  if (inner == 0) throw DomainError("log_sum_exp over an empty axis");
  auto xv = x.values();
  auto index = [=](std::size_t o, std::size_t i) { return over_rows ? i * cols + o : o * cols + i; };
  std::vector<double> out(outer);
  std::vector<double> buf(inner);
  for (std::size_t o = 0; o < outer; ++o) {
    for (std::size_t i = 0; i < inner; ++i) buf[i] = xv[index(o, i)];
    out[o] = log_sum_exp(buf);
  }
  Shape shape;
  if (x.rank() <= 1) {
    shape = {1};
  } else {
    shape = over_rows ? Shape{1, cols} : Shape{rows, 1};
  }
  Tensor result(std::move(shape), std::move(out), g.tracks({&x}));
  if (result.requires_grad()) {
    g.record({x}, result, [x, result, outer, inner, index]() mutable {
      auto go = result.grad();
      auto yv = result.values();
      auto xv = x.values();
      auto gx = x.mutable_grad();
      for (std::size_t o = 0; o < outer; ++o)
        for (std::size_t i = 0; i < inner; ++i) {
          const auto k = index(o, i);
          gx[k] += go[o] * std::exp(xv[k] - yv[o]);
        }
    });
  }
  return result;
}

Tensor log_softmax(Graph& g, const Tensor& x) {
  const double z = log_sum_exp(x.values());
  auto xv = x.values();
  std::vector<double> out(xv.size());
  for (std::size_t i = 0; i < xv.size(); ++i) out[i] = xv[i] - z;
  Tensor result(x.shape(), std::move(out), g.tracks({&x}));
  if (result.requires_grad()) {
    g.record({x}, result, [x, result]() mutable {
      auto go = result.grad();
      auto yv = result.values();
      auto gx = x.mutable_grad();
      const double total = std::accumulate(go.begin(), go.end(), 0.0);
      for (std::size_t i = 0; i < gx.size(); ++i) gx[i] += go[i] - std::exp(yv[i]) * total;
    });
  }
  return result;
}

Tensor pick(Graph& g, const Tensor& x, std::size_t index) {
  if (index >= x.size()) {
    throw DomainError("pick: index " + std::to_string(index) + " outside " + shape_string(x.shape()));
  }
  Tensor result = Tensor::scalar(x.values()[index], g.tracks({&x}));
  if (result.requires_grad()) {
    g.record({x}, result, [x, result, index]() mutable { x.mutable_grad()[index] += result.grad()[0]; });
  }
  return result;
}

Tensor max_over_rows(Graph& g, const Tensor& m) {
  const std::size_t rows = m.rows(), cols = m.cols();
  if (rows == 0) throw DomainError("max_over_rows on an empty matrix");
  auto mv = m.values();
  std::vector<double> out(cols);
  std::vector<std::size_t> arg(cols, 0);
  for (std::size_t j = 0; j < cols; ++j) {
    out[j] = mv[j];
    for (std::size_t i = 1; i < rows; ++i) {
      if (mv[i * cols + j] > out[j]) {
        out[j] = mv[i * cols + j];
        arg[j] = i;
      }
    }
  }
  Tensor result({cols, 1}, std::move(out), g.tracks({&m}));
  if (result.requires_grad()) {
    g.record({m}, result, [m, result, arg = std::move(arg), cols]() mutable {
      auto go = result.grad();
      auto gm = m.mutable_grad();
      for (std::size_t j = 0; j < cols; ++j) gm[arg[j] * cols + j] += go[j];
    });
  }
  return result;
}

// ---------------------------------------------------------------------------
// Shape manipulation

Tensor slice_rows(Graph& g, const Tensor& x, std::size_t begin, std::size_t end) {
  if (begin > end || end > x.rows()) {
    throw DimensionError("slice_rows [" + std::to_string(begin) + "," + std::to_string(end) + ") of " +
                         shape_string(x.shape()));
  }
  const std::size_t cols = x.cols();
  auto xv = x.values();
  std::vector<double> out(xv.begin() + begin * cols, xv.begin() + end * cols);
  Shape shape = x.shape();
  shape[0] = end - begin;
  Tensor result(std::move(shape), std::move(out), g.tracks({&x}));
  if (result.requires_grad()) {
    g.record({x}, result, [x, result, offset = begin * cols]() mutable {
      auto go = result.grad();
      auto gx = x.mutable_grad();
      for (std::size_t i = 0; i < go.size(); ++i) gx[offset + i] += go[i];
    });
  }
  return result;
}

Tensor concat_rows(Graph& g, std::span<const Tensor> parts) {
  if (parts.empty()) throw DomainError("concat_rows of nothing");
  const std::size_t cols = parts[0].cols();
  std::size_t rows = 0;
  for (const auto& p : parts) {
    if (p.cols() != cols || p.rank() > 2) {
      throw DimensionError("concat_rows: " + shape_string(p.shape()) + " vs " + shape_string(parts[0].shape()));
    }
    rows += p.rows();
  }
  std::vector<double> out;
  out.reserve(rows * cols);
  for (const auto& p : parts) out.insert(out.end(), p.values().begin(), p.values().end());
  Tensor result({rows, cols}, std::move(out), g.tracks(parts));
  if (result.requires_grad()) {
    std::vector<Tensor> inputs(parts.begin(), parts.end());
    g.record(inputs, result, [inputs, result]() mutable {
      auto go = result.grad();
      std::size_t offset = 0;
      for (auto& p : inputs) {
        if (p.requires_grad()) {
          auto gp = p.mutable_grad();
          for (std::size_t i = 0; i < gp.size(); ++i) gp[i] += go[offset + i];
        }
        offset += p.size();
      }
    });
  }
  return result;
}

Tensor stack_rows(Graph& g, std::span<const Tensor> rows) {
  if (rows.empty()) throw DomainError("stack_rows of nothing");
  const std::size_t width = rows[0].size();
  std::vector<double> out;
  out.reserve(rows.size() * width);
  for (const auto& r : rows) {
    if (r.size() != width) {
      throw DimensionError("stack_rows: " + shape_string(r.shape()) + " vs " + shape_string(rows[0].shape()));
    }
    out.insert(out.end(), r.values().begin(), r.values().end());
  }
  Tensor result({rows.size(), width}, std::move(out), g.tracks(rows));
  if (result.requires_grad()) {
    std::vector<Tensor> inputs(rows.begin(), rows.end());
    g.record(inputs, result, [inputs, result, width]() mutable {
      auto go = result.grad();
      for (std::size_t r = 0; r < inputs.size(); ++r) {
        if (!inputs[r].requires_grad()) continue;
        auto gp = inputs[r].mutable_grad();
        for (std::size_t i = 0; i < width; ++i) gp[i] += go[r * width + i];
      }
    });
  }
  return result;
}

Tensor conv1d(Graph& g, const Tensor& input, const Tensor& filters, const Tensor& bias,
              std::size_t width) {
  const std::size_t steps = input.rows(), channels = input.cols();
  const std::size_t count = filters.rows();
  if (width == 0 || width > steps) {
    throw DimensionError("conv1d: width " + std::to_string(width) + " for input " + shape_string(input.shape()));
  }
  if (filters.cols() < width * channels || filters.cols() % channels != 0 || bias.size() != count) {
    throw DimensionError("conv1d: filters " + shape_string(filters.shape()) + ", bias " +
                         shape_string(bias.shape()) + ", input " + shape_string(input.shape()));
  }
  // Filters may be stored wider than `width` (see detector fallback); only the
  // leading width * channels entries of each row take part.
  const std::size_t stride = filters.cols();
  const std::size_t span = width * channels;
  const std::size_t out_rows = steps - width + 1;
  auto xv = input.values();
  auto wv = filters.values();
  auto bv = bias.values();
  std::vector<double> out(out_rows * count);
  for (std::size_t t = 0; t < out_rows; ++t) {
    const double* window = xv.data() + t * channels;
    for (std::size_t f = 0; f < count; ++f) {
      const double* w = wv.data() + f * stride;
      double acc = bv[f];
      for (std::size_t i = 0; i < span; ++i) acc += w[i] * window[i];
      out[t * count + f] = acc;
    }
  }
  Tensor result({out_rows, count}, std::move(out), g.tracks({&input, &filters, &bias}));
  if (result.requires_grad()) {
    g.record({input, filters, bias}, result,
             [input, filters, bias, result, out_rows, count, channels, stride, span]() mutable {
               auto go = result.grad();
               auto xv = input.values();
               auto wv = filters.values();
               std::span<double> gx, gw, gb;
               if (input.requires_grad()) gx = input.mutable_grad();
               if (filters.requires_grad()) gw = filters.mutable_grad();
               if (bias.requires_grad()) gb = bias.mutable_grad();
               for (std::size_t t = 0; t < out_rows; ++t) {
                 for (std::size_t f = 0; f < count; ++f) {
                   const double d = go[t * count + f];
                   if (d == 0.0) continue;
                   if (!gb.empty()) gb[f] += d;
                   if (!gw.empty()) {
                     for (std::size_t i = 0; i < span; ++i) gw[f * stride + i] += d * xv[t * channels + i];
                   }
                   if (!gx.empty()) {
                     for (std::size_t i = 0; i < span; ++i) gx[t * channels + i] += d * wv[f * stride + i];
                   }
                 }
               }
             });
  }
  return result;
}

// ---------------------------------------------------------------------------
// Parameters

Tensor ParameterSet::add(std::string name, Tensor tensor) {
  if (contains(name)) throw ContractError("duplicate parameter " + name);
  tensor.set_requires_grad(true);
  entries_.emplace_back(std::move(name), std::move(tensor));
  return entries_.back().second;
}

const Tensor& ParameterSet::get(std::string_view name) const {
  for (const auto& [n, t] : entries_)
    if (n == name) return t;
  throw ContractError("unknown parameter " + std::string(name));
}

Tensor& ParameterSet::get(std::string_view name) {
  return const_cast<Tensor&>(std::as_const(*this).get(name));
}

bool ParameterSet::contains(std::string_view name) const {
  return std::any_of(entries_.begin(), entries_.end(), [&](const auto& e) { return e.first == name; });
}

void ParameterSet::zero_grad() {
  for (auto& [name, t] : entries_) t.zero_grad();
}

std::size_t ParameterSet::scalar_count() const {
  std::size_t n = 0;
  for (const auto& [name, t] : entries_) n += t.size();
  return n;
}

double sgd_step(ParameterSet& params, double lr, double clip) {
  double squared = 0.0;
  for (const auto& [name, t] : params) {
    for (double v : t.grad()) {
      if (!std::isfinite(v)) throw TrainingError("non-finite gradient in parameter '" + name + "'");
      squared += v * v;
    }
  }
  const double norm = std::sqrt(squared);
  const double factor = norm > clip ? clip / norm : 1.0;
  for (auto& [name, t] : params) {
    if (!t.has_grad()) continue;
    auto gv = t.grad();
    auto pv = t.mutable_values();
    for (std::size_t i = 0; i < pv.size(); ++i) pv[i] -= lr * factor * gv[i];
  }
  return norm;
}

void init_uniform(Tensor& t, Rng& rng, std::size_t fan_in, std::size_t fan_out) {
  const double r = std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
  for (auto& v : t.mutable_values()) v = rng.uniform(-r, r);
}

}  // namespace seqtag::ad
