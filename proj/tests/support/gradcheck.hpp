#pragma once

#include <cmath>
#include <functional>
#include <vector>

#include "core/rng.hpp"
#include "core/tensor.hpp"

namespace testsupport {

// Central finite differences against the reverse-mode gradient. `make_loss`
// must rebuild the whole graph from the leaf values each time it is called
// (the leaves are edited in place between calls). Returns the maximum
// relative error over all checked entries.
//
// rel_err = |ad - fd| / max(|ad|, |fd|, floor)
inline double max_grad_rel_err(std::vector<interformer::Tensor>& leaves,
                               const std::function<interformer::Tensor()>& make_loss,
                               double h = 1e-5, double floor_ = 1e-6) {
  using interformer::Tensor;
  for (auto& leaf : leaves) leaf.zero_grad();
  Tensor loss = make_loss();
  loss.backward();

  double worst = 0.0;
  for (auto& leaf : leaves) {
    std::vector<double> analytic = leaf.grad();
    for (std::size_t i = 0; i < leaf.numel(); ++i) {
      double& x = leaf.mutable_data()[i];
      const double saved = x;
      x = saved + h;
      const double up = make_loss().value();
      x = saved - h;
      const double down = make_loss().value();
      x = saved;
      const double fd = (up - down) / (2.0 * h);
      const double ad = analytic[i];
      const double denom = std::max({std::abs(ad), std::abs(fd), floor_});
      worst = std::max(worst, std::abs(ad - fd) / denom);
    }
  }
  return worst;
}

// Same check but sampling only `n_entries` coordinates of each leaf; used for
// whole-model checks where exhaustive differencing is too slow.
inline double sampled_grad_rel_err(std::vector<interformer::Tensor>& leaves,
                                   const std::function<interformer::Tensor()>& make_loss,
                                   std::size_t n_entries, interformer::Rng& rng, double h = 1e-5,
                                   double floor_ = 1e-6) {
  using interformer::Tensor;
  for (auto& leaf : leaves) leaf.zero_grad();
  Tensor loss = make_loss();
  loss.backward();

  double worst = 0.0;
  for (auto& leaf : leaves) {
    const std::vector<double> analytic = leaf.grad();
    const std::size_t checks = std::min(n_entries, leaf.numel());
    for (std::size_t c = 0; c < checks; ++c) {
      const auto i = static_cast<std::size_t>(
          rng.uniform_int(0, static_cast<std::int64_t>(leaf.numel()) - 1));
      double& x = leaf.mutable_data()[i];
      const double saved = x;
      x = saved + h;
      const double up = make_loss().value();
      x = saved - h;
      const double down = make_loss().value();
      x = saved;
      const double fd = (up - down) / (2.0 * h);
      const double ad = analytic[i];
      const double denom = std::max({std::abs(ad), std::abs(fd), floor_});
      worst = std::max(worst, std::abs(ad - fd) / denom);
    }
  }
  return worst;
}

inline interformer::Tensor random_tensor(std::vector<std::size_t> shape, interformer::Rng& rng,
                                         bool requires_grad = true, double lo = -1.0,
                                         double hi = 1.0) {
  std::size_t n = 1;
  for (auto d : shape) n *= d;
  std::vector<double> data(n);
  for (auto& v : data) v = rng.uniform(lo, hi);
  return interformer::Tensor::from_data(std::move(shape), std::move(data), requires_grad);
}

// Scalar probe: sum of elementwise product with a fixed random projection, so
// matrix-valued ops can be checked through a single scalar.
inline interformer::Tensor project_to_scalar(const interformer::Tensor& x,
                                             const std::vector<double>& projection) {
  return interformer::sum(interformer::mul_constant(x, projection));
}

inline std::vector<double> random_projection(std::size_t n, interformer::Rng& rng) {
  std::vector<double> p(n);
  for (auto& v : p) v = rng.uniform(-1.0, 1.0);
  return p;
}

}  // namespace testsupport
