#pragma once

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <functional>
#include <string>
#include <vector>

#include "seqtag/autodiff.hpp"
#include "seqtag/rng.hpp"

namespace seqtag::testing {

inline ad::Tensor random_tensor(Rng& rng, ad::Shape shape, double lo = -1.0, double hi = 1.0,
                                bool requires_grad = true) {
  std::size_t n = 1;
  for (auto d : shape) n *= d;
  std::vector<double> v(n);
  for (auto& x : v) x = rng.uniform(lo, hi);
  return ad::Tensor(std::move(shape), std::move(v), requires_grad);
}

// |analytic - numeric| / max(|analytic|, |numeric|, floor)
inline double relative_error(double analytic, double numeric, double floor = 1e-6) {
  return std::abs(analytic - numeric) / std::max({std::abs(analytic), std::abs(numeric), floor});
}

// Largest relative error between the backward gradient of `loss` with respect
// to each tensor in `params` and its central finite difference.
inline double gradient_check(const std::function<ad::Tensor(ad::Graph&)>& loss, std::vector<ad::Tensor> params,
                             double eps = 1e-5) {
  ad::Graph g;
  auto out = loss(g);
  g.backward(out);
  std::vector<std::vector<double>> analytic;
  for (auto& p : params) {
    if (p.has_grad()) {
      analytic.emplace_back(p.grad().begin(), p.grad().end());
    } else {
      analytic.emplace_back(p.size(), 0.0);
    }
  }
  double worst = 0.0;
  for (std::size_t k = 0; k < params.size(); ++k) {
    auto values = params[k].mutable_values();
    for (std::size_t i = 0; i < values.size(); ++i) {
      const double saved = values[i];
      values[i] = saved + eps;
      ad::Graph gp(ad::Graph::Mode::inference);
      const double up = loss(gp).item();
      values[i] = saved - eps;
      ad::Graph gm(ad::Graph::Mode::inference);
      const double down = loss(gm).item();
      values[i] = saved;
      worst = std::max(worst, relative_error(analytic[k][i], (up - down) / (2 * eps)));
    }
  }
  return worst;
}

// Fresh empty directory under the system temp path, removed on destruction.
class TempDir {
 public:
  explicit TempDir(const std::string& name) {
    path_ = std::filesystem::temp_directory_path() / ("seqtag_test_" + name);
    std::filesystem::remove_all(path_);
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

 private:
  std::filesystem::path path_;
};

}  // namespace seqtag::testing
