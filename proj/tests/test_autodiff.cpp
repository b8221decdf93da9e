#include <gtest/gtest.h>

#include <cmath>
#include <limits>

#include "seqtag/autodiff.hpp"
#include "seqtag/errors.hpp"
#include "support.hpp"

using namespace seqtag;
using namespace seqtag::ad;
using seqtag::testing::gradient_check;
using seqtag::testing::random_tensor;

namespace {

constexpr double kFdTolerance = 1e-4;

Tensor constant(std::size_t r, std::size_t c, std::vector<double> v) { return Tensor::matrix(r, c, std::move(v)); }

}  // namespace

TEST(Matmul, IdentityLeavesMatrixUnchanged) {
  Graph g;
  auto out = matmul(g, constant(2, 2, {1, 0, 0, 1}), constant(2, 2, {1, 2, 3, 4}));
  EXPECT_EQ(std::vector<double>(out.values().begin(), out.values().end()), (std::vector<double>{1, 2, 3, 4}));
}

TEST(Matmul, ZeroMatrixGivesZero) {
  Graph g;
  auto out = matmul(g, constant(2, 2, {0, 0, 0, 0}), constant(2, 3, {1, 2, 3, 4, 5, 6}));
  ASSERT_EQ(out.shape(), (Shape{2, 3}));
  for (double v : out.values()) EXPECT_EQ(v, 0.0);
}

TEST(Matmul, GradientOfSumMatchesFiniteDifferences) {
  Rng rng(11);
  auto a = random_tensor(rng, {3, 4});
  auto b = random_tensor(rng, {4, 2});
  EXPECT_LT(gradient_check([&](Graph& g) { return sum(g, matmul(g, a, b)); }, {a, b}), 1e-6);
}

TEST(Matmul, ShapeMismatchNamesBothShapes) {
  Graph g;
  try {
    matmul(g, Tensor::zeros({2, 3}), Tensor::zeros({2, 3}));
    FAIL() << "expected DimensionError";
  } catch (const DimensionError& e) {
    const std::string msg = e.what();
    EXPECT_NE(msg.find("[2x3] x [2x3]"), std::string::npos) << msg;
  }
}

TEST(Elementwise, ActivationFixedPoints) {
  Graph g;
  EXPECT_DOUBLE_EQ(sigmoid(g, Tensor::scalar(0.0)).item(), 0.5);
  EXPECT_DOUBLE_EQ(ad::tanh(g, Tensor::scalar(0.0)).item(), 0.0);
  EXPECT_DOUBLE_EQ(relu(g, Tensor::scalar(-1.0)).item(), 0.0);
  EXPECT_DOUBLE_EQ(relu(g, Tensor::scalar(2.5)).item(), 2.5);
}

TEST(Elementwise, SigmoidSlopeAtZeroIsQuarter) {
  auto x = Tensor::column({0.0, 0.0, 0.0}, true);
  Graph g;
  auto loss = sum(g, sigmoid(g, x));
  g.backward(loss);
  for (double v : x.grad()) EXPECT_DOUBLE_EQ(v, 0.25);
  EXPECT_LT(gradient_check([&](Graph& h) { return sum(h, sigmoid(h, x)); }, {x}), kFdTolerance);
}

TEST(Elementwise, ScalarBroadcastAndShapeErrors) {
  Graph g;
  auto out = mul(g, Tensor::scalar(2.0), constant(1, 3, {1, 2, 3}));
  EXPECT_EQ(std::vector<double>(out.values().begin(), out.values().end()), (std::vector<double>{2, 4, 6}));
  EXPECT_THROW(add(g, Tensor::zeros({2, 2}), Tensor::zeros({3, 1})), DimensionError);
  const Tensor inputs[] = {Tensor::zeros({2}), Tensor::zeros({2}), Tensor::zeros({2})};
  EXPECT_THROW(elementwise(g, ElementwiseOp::add, inputs), ContractError);
}

TEST(Elementwise, GradientsMatchFiniteDifferences) {
  Rng rng(5);
  for (int trial = 0; trial < 10; ++trial) {
    auto a = random_tensor(rng, {2, 3});
    auto b = random_tensor(rng, {2, 3});
    auto s = random_tensor(rng, {1});
    // Keep relu inputs away from the kink.
    auto r = random_tensor(rng, {2, 3}, 0.1, 1.0);
    for (std::size_t i = 0; i < r.size(); i += 2) r.mutable_values()[i] *= -1;
    EXPECT_LT(gradient_check([&](Graph& g) { return sum(g, add(g, a, b)); }, {a, b}), kFdTolerance);
    EXPECT_LT(gradient_check([&](Graph& g) { return sum(g, mul(g, sub(g, a, b), a)); }, {a, b}), kFdTolerance);
    EXPECT_LT(gradient_check([&](Graph& g) { return sum(g, mul(g, s, a)); }, {a, s}), kFdTolerance);
    EXPECT_LT(gradient_check([&](Graph& g) { return sum(g, scale(g, ad::tanh(g, a), -3.0)); }, {a}), kFdTolerance);
    EXPECT_LT(gradient_check([&](Graph& g) { return sum(g, mul(g, relu(g, r), b)); }, {r, b}), kFdTolerance);
  }
}

TEST(LogSumExp, Examples) {
  const double zero[] = {0.0, 0.0};
  EXPECT_NEAR(log_sum_exp(zero), std::log(2.0), 1e-15);
  const double big[] = {1000.0, 1000.0};
  EXPECT_NEAR(log_sum_exp(big), 1000.0 + std::log(2.0), 1e-12);
  const double small[] = {1.0, 2.0, 3.0};
  const double direct = std::log(std::exp(1.0) + std::exp(2.0) + std::exp(3.0));
  EXPECT_NEAR(log_sum_exp(small), direct, 1e-12 * direct);
  EXPECT_NEAR(log_sum_exp(small), 3.407606, 5e-7);
}

TEST(LogSumExp, ShiftInvariance) {
  Rng rng(3);
  std::vector<double> x(7), shifted(7);
  for (std::size_t i = 0; i < x.size(); ++i) {
    x[i] = rng.uniform(-5, 5);
    shifted[i] = x[i] + 1e3;
  }
  EXPECT_NEAR(log_sum_exp(shifted), log_sum_exp(x) + 1e3, 1e-9);
}

TEST(LogSumExp, EmptyAxisIsDomainError) {
  EXPECT_THROW(log_sum_exp(std::span<const double>()), DomainError);
  Graph g;
  EXPECT_THROW(log_sum_exp(g, Tensor::zeros({0, 3}), 0), DomainError);
}

TEST(LogSumExp, AxisGradients) {
  Rng rng(8);
  for (int trial = 0; trial < 10; ++trial) {
    auto x = random_tensor(rng, {3, 4}, -3, 3);
    auto w = random_tensor(rng, {1, 4}, -1, 1, false);
    auto v = random_tensor(rng, {3, 1}, -1, 1, false);
    EXPECT_LT(gradient_check([&](Graph& g) { return sum(g, mul(g, log_sum_exp(g, x, 0), w)); }, {x}), kFdTolerance);
    EXPECT_LT(gradient_check([&](Graph& g) { return sum(g, mul(g, log_sum_exp(g, x, 1), v)); }, {x}), kFdTolerance);
  }
}

TEST(Backward, ConstantLossLeavesZeroGradients) {
  auto w = Tensor::column({1.0, 2.0}, true);
  Graph g;
  auto loss = sum(g, Tensor::column({3.0, 4.0}));
  g.backward(loss);
  for (double v : w.grad()) EXPECT_EQ(v, 0.0);
}

TEST(Backward, SquaredNormGradient) {
  auto w = Tensor::column({1.0, 2.0}, true);
  auto unused = Tensor::column({5.0}, true);
  Graph g;
  auto loss = sum(g, mul(g, w, w));
  g.backward(loss);
  EXPECT_EQ(std::vector<double>(w.grad().begin(), w.grad().end()), (std::vector<double>{2.0, 4.0}));
  for (double v : unused.grad()) EXPECT_EQ(v, 0.0);
}

TEST(Backward, NonScalarLossIsContractError) {
  auto w = Tensor::column({1.0, 2.0}, true);
  Graph g;
  auto out = mul(g, w, w);
  EXPECT_THROW(g.backward(out), ContractError);
}

TEST(Backward, RepeatedRunsAreBitwiseIdentical) {
  auto run = [] {
    Rng rng(21);
    auto a = random_tensor(rng, {4, 5});
    auto b = random_tensor(rng, {5, 3});
    Graph g;
    auto loss = sum(g, ad::tanh(g, matmul(g, a, b)));
    g.backward(loss);
    std::vector<double> grads(a.grad().begin(), a.grad().end());
    grads.insert(grads.end(), b.grad().begin(), b.grad().end());
    return grads;
  };
  EXPECT_EQ(run(), run());
}

TEST(Structural, GradientsMatchFiniteDifferences) {
  Rng rng(17);
  for (int trial = 0; trial < 10; ++trial) {
    auto m = random_tensor(rng, {3, 4});
    auto n = random_tensor(rng, {2, 4});
    auto bias = random_tensor(rng, {4});
    auto w = random_tensor(rng, {4, 3}, -1, 1, false);
    auto col = random_tensor(rng, {4, 1}, -1, 1, false);
    EXPECT_LT(gradient_check([&](Graph& g) { return sum(g, mul(g, transpose(g, m), w)); }, {m}), kFdTolerance);
    EXPECT_LT(gradient_check([&](Graph& g) { return sum(g, ad::tanh(g, add_row_bias(g, m, bias))); }, {m, bias}),
              kFdTolerance);
    EXPECT_LT(gradient_check([&](Graph& g) { return sum(g, mul(g, log_softmax(g, m), ad::tanh(g, m))); }, {m}), kFdTolerance);
    EXPECT_LT(gradient_check(
                  [&](Graph& g) {
                    const Tensor parts[] = {slice_rows(g, m, 1, 3), n};
                    return sum(g, ad::tanh(g, concat_rows(g, parts)));
                  },
                  {m, n}),
              kFdTolerance);
    EXPECT_LT(gradient_check(
                  [&](Graph& g) {
                    const Tensor rows[] = {pick(g, m, 0), pick(g, n, 5), sum(g, m)};
                    return sum(g, ad::tanh(g, stack_rows(g, rows)));
                  },
                  {m, n}),
              kFdTolerance);
    EXPECT_LT(gradient_check([&](Graph& g) { return sum(g, mul(g, max_over_rows(g, m), col)); }, {m}), kFdTolerance);
  }
}

TEST(Conv1d, MatchesDirectSumAndGradients) {
  Rng rng(4);
  for (int trial = 0; trial < 10; ++trial) {
    auto x = random_tensor(rng, {5, 3});
    auto f = random_tensor(rng, {2, 9});  // width 3, 3 channels
    auto b = random_tensor(rng, {2});
    Graph g;
    auto out = conv1d(g, x, f, b, 3);
    ASSERT_EQ(out.shape(), (Shape{3, 2}));
    for (std::size_t t = 0; t < 3; ++t) {
      for (std::size_t k = 0; k < 2; ++k) {
        double acc = b.values()[k];
        for (std::size_t dt = 0; dt < 3; ++dt)
          for (std::size_t c = 0; c < 3; ++c) acc += f(k, dt * 3 + c) * x(t + dt, c);
        EXPECT_NEAR(out(t, k), acc, 1e-12);
      }
    }
    EXPECT_LT(gradient_check([&](Graph& h) { return sum(h, ad::tanh(h, conv1d(h, x, f, b, 3))); }, {x, f, b}),
              kFdTolerance);
    // Narrower use of wider filters reads only the leading entries.
    EXPECT_LT(gradient_check([&](Graph& h) { return sum(h, ad::tanh(h, conv1d(h, x, f, b, 2))); }, {x, f, b}),
              kFdTolerance);
  }
  Graph g;
  EXPECT_THROW(conv1d(g, Tensor::zeros({2, 3}), Tensor::zeros({1, 9}), Tensor::zeros({1}), 3), DimensionError);
}

TEST(SgdStep, ZeroGradientLeavesParameters) {
  ParameterSet params;
  auto p = params.add("p", Tensor::column({1.0, -2.0}));
  p.mutable_grad();
  sgd_step(params, 0.1, 5.0);
  EXPECT_EQ(p.values()[0], 1.0);
  EXPECT_EQ(p.values()[1], -2.0);
}

TEST(SgdStep, UnclippedStep) {
  ParameterSet params;
  auto p = params.add("p", Tensor::scalar(1.0));
  p.mutable_grad()[0] = 2.0;
  sgd_step(params, 0.1, std::numeric_limits<double>::infinity());
  EXPECT_NEAR(p.item(), 0.8, 1e-15);
}

TEST(SgdStep, GlobalNormClipping) {
  ParameterSet params;
  auto a = params.add("a", Tensor::column({0.0, 0.0}));
  auto b = params.add("b", Tensor::scalar(0.0));
  a.mutable_grad()[0] = 6.0;
  a.mutable_grad()[1] = 0.0;
  b.mutable_grad()[0] = 8.0;  // global norm 10
  const double norm = sgd_step(params, 1.0, 1.0);
  EXPECT_DOUBLE_EQ(norm, 10.0);
  EXPECT_NEAR(a.values()[0], -0.6, 1e-15);
  EXPECT_NEAR(b.item(), -0.8, 1e-15);
}

TEST(SgdStep, NonFiniteGradientNamesParameter) {
  ParameterSet params;
  params.add("fine", Tensor::scalar(0.0)).mutable_grad()[0] = 1.0;
  params.add("broken", Tensor::scalar(0.0)).mutable_grad()[0] = std::nan("");
  try {
    sgd_step(params, 0.1, 5.0);
    FAIL() << "expected TrainingError";
  } catch (const TrainingError& e) {
    EXPECT_NE(std::string(e.what()).find("broken"), std::string::npos);
  }
}

TEST(InitUniform, BoundsAndDeterminism) {
  auto draw = [] {
    Rng rng(99);
    auto t = Tensor::zeros({20, 30});
    init_uniform(t, rng, 30, 20);
    return std::vector<double>(t.values().begin(), t.values().end());
  };
  const auto v = draw();
  const double r = std::sqrt(6.0 / 50.0);
  for (double x : v) {
    EXPECT_GE(x, -r);
    EXPECT_LT(x, r);
  }
  EXPECT_EQ(v, draw());
}
