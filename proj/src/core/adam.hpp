#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "core/tensor.hpp"

namespace interformer {

struct AdamConfig {
  double alpha = 1e-4;
  double beta1 = 0.9;
  double beta2 = 0.98;
  double epsilon = 1e-9;
};

// Per-parameter first/second moment buffers plus the shared step counter.
struct AdamState {
  AdamConfig config;
  std::vector<std::vector<double>> first_moment;
  std::vector<std::vector<double>> second_moment;
  std::uint64_t step = 0;
};

AdamState make_adam_state(const std::vector<Tensor>& params, const AdamConfig& config = {});

// One bias-corrected update over all parameters. `grads[i]` must match the
// shape of `params[i]`; moments are taken from (and written back to) `state`.
void adam_step(std::vector<Tensor>& params, const std::vector<const std::vector<double>*>& grads,
               AdamState& state);

// Convenience form reading each parameter's own accumulated gradient.
void adam_step(std::vector<Tensor>& params, AdamState& state);

}  // namespace interformer
