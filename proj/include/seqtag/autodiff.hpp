#pragma once

#include <cstddef>
#include <functional>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace seqtag {
class Rng;
}

namespace seqtag::ad {

using Shape = std::vector<std::size_t>;

std::string shape_string(const Shape& shape);

struct TensorData {
  Shape shape;
  std::vector<double> values;  // row-major
  std::vector<double> grad;    // empty until a backward pass touches it
  bool requires_grad = false;
};

// Shared handle to a numeric array. Copies alias the same storage; use
// clone() for a deep copy. Rank-1 tensors of shape {n} behave as n x 1
// columns wherever a matrix is expected.
class Tensor {
 public:
  Tensor() = default;
  Tensor(Shape shape, std::vector<double> values, bool requires_grad = false);

  static Tensor zeros(Shape shape, bool requires_grad = false);
  static Tensor scalar(double value, bool requires_grad = false);
  static Tensor column(std::vector<double> values, bool requires_grad = false);
  static Tensor matrix(std::size_t rows, std::size_t cols, std::vector<double> values,
                       bool requires_grad = false);

  bool defined() const { return data_ != nullptr; }
  const Shape& shape() const { return data_->shape; }
  std::size_t rank() const { return data_->shape.size(); }
  std::size_t size() const { return data_->values.size(); }
  std::size_t rows() const;
  std::size_t cols() const;

  std::span<const double> values() const { return data_->values; }
  std::span<double> mutable_values() { return data_->values; }
  double operator()(std::size_t r, std::size_t c) const { return data_->values[r * cols() + c]; }
  double item() const;

  bool requires_grad() const { return data_->requires_grad; }
  void set_requires_grad(bool flag) { data_->requires_grad = flag; }
  bool has_grad() const { return !data_->grad.empty(); }
  std::span<const double> grad() const { return data_->grad; }
  // Allocates a zero gradient buffer on first use. Gradients live in the
  // shared storage, so const handles may accumulate into them.
  std::span<double> mutable_grad() const;
  void zero_grad();

  Tensor clone() const;
  Tensor detach() const;
  bool same(const Tensor& other) const { return data_ == other.data_; }

 private:
  std::shared_ptr<TensorData> data_;
};

// Record of the operations applied during one forward pass. A graph is built
// per sentence and discarded after backward. Nodes are appended in execution
// order, which is a topological order by construction.
class Graph {
 public:
  enum class Mode { record, inference };

  explicit Graph(Mode mode = Mode::record) : mode_(mode) {}
  Graph(const Graph&) = delete;
  Graph& operator=(const Graph&) = delete;

  bool recording() const { return mode_ == Mode::record; }
  std::size_t size() const { return nodes_.size(); }

  // True when an op over `inputs` must be recorded.
  bool tracks(std::initializer_list<const Tensor*> inputs) const;
  bool tracks(std::span<const Tensor> inputs) const;

  void record(std::vector<Tensor> inputs, Tensor output, std::function<void()> propagate);

  // Populates grad on every tensor reachable from `loss`. Gradients from a
  // previous backward over this graph are discarded first.
  void backward(const Tensor& loss);

 private:
  struct Node {
    std::vector<Tensor> inputs;
    Tensor output;
    std::function<void()> propagate;
  };

  Mode mode_;
  std::vector<Node> nodes_;
};

enum class ElementwiseOp { add, sub, mul, sigmoid, tanh, relu };

// Binary ops accept equal shapes, or a size-1 operand broadcast over the other.
Tensor elementwise(Graph& g, ElementwiseOp op, std::span<const Tensor> inputs);

Tensor add(Graph& g, const Tensor& a, const Tensor& b);
Tensor sub(Graph& g, const Tensor& a, const Tensor& b);
Tensor mul(Graph& g, const Tensor& a, const Tensor& b);
Tensor scale(Graph& g, const Tensor& a, double factor);
Tensor sigmoid(Graph& g, const Tensor& x);
Tensor tanh(Graph& g, const Tensor& x);
Tensor relu(Graph& g, const Tensor& x);

Tensor matmul(Graph& g, const Tensor& a, const Tensor& b);
Tensor transpose(Graph& g, const Tensor& a);

// Adds a length-n bias to every row of an m x n matrix.
Tensor add_row_bias(Graph& g, const Tensor& m, const Tensor& bias);

Tensor sum(Graph& g, const Tensor& x);

// axis 0 reduces over rows (result 1 x cols), axis 1 over columns
// (result rows x 1). Rank-1 input reduces to a single value.
Tensor log_sum_exp(Graph& g, const Tensor& x, std::size_t axis = 0);
double log_sum_exp(std::span<const double> x);

Tensor log_softmax(Graph& g, const Tensor& x);
Tensor pick(Graph& g, const Tensor& x, std::size_t index);

Tensor slice_rows(Graph& g, const Tensor& x, std::size_t begin, std::size_t end);
Tensor concat_rows(Graph& g, std::span<const Tensor> parts);
// Stacks n equally sized tensors as the rows of an n x size matrix.
Tensor stack_rows(Graph& g, std::span<const Tensor> rows);

// Column-wise maximum over the rows of a T x n matrix, as an n x 1 column.
// Gradient flows to the first maximal row.
Tensor max_over_rows(Graph& g, const Tensor& m);

// Valid 1-D convolution over the rows of a T x C input. Each of the F filters
// is one row of `filters` laid out as width blocks of C. Output is
// (T - width + 1) x F.
Tensor conv1d(Graph& g, const Tensor& input, const Tensor& filters, const Tensor& bias,
              std::size_t width);

// Named parameters in a fixed order; the order defines checkpoint layout and
// the gradient-norm accumulation order.
class ParameterSet {
 public:
  // Returns a handle sharing storage with the stored parameter.
  Tensor add(std::string name, Tensor tensor);
  const Tensor& get(std::string_view name) const;
  Tensor& get(std::string_view name);
  bool contains(std::string_view name) const;

  std::size_t size() const { return entries_.size(); }
  auto begin() { return entries_.begin(); }
  auto end() { return entries_.end(); }
  auto begin() const { return entries_.begin(); }
  auto end() const { return entries_.end(); }

  void zero_grad();
  std::size_t scalar_count() const;

 private:
  std::vector<std::pair<std::string, Tensor>> entries_;
};

// p <- p - lr * g after rescaling all gradients so their global L2 norm does
// not exceed `clip`. Returns the pre-clipping norm. Throws TrainingError naming
// the first parameter holding a non-finite gradient.
double sgd_step(ParameterSet& params, double lr, double clip);

// Uniform(-r, r) with r = sqrt(6 / (fan_in + fan_out)).
void init_uniform(Tensor& t, Rng& rng, std::size_t fan_in, std::size_t fan_out);

}  // namespace seqtag::ad
