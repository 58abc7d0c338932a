#include "core/adam.hpp"

#include <cmath>
#include <stdexcept>

namespace interformer {

AdamState make_adam_state(const std::vector<Tensor>& params, const AdamConfig& config) {
  AdamState state;
  state.config = config;
  state.first_moment.reserve(params.size());
  state.second_moment.reserve(params.size());
  for (const auto& p : params) {
    state.first_moment.emplace_back(p.numel(), 0.0);
    state.second_moment.emplace_back(p.numel(), 0.0);
  }
  return state;
}

void adam_step(std::vector<Tensor>& params, const std::vector<const std::vector<double>*>& grads,
               AdamState& state) {
  if (params.size() != grads.size() || params.size() != state.first_moment.size()) {
    throw std::invalid_argument("adam_step: parameter/gradient/state count mismatch");
  }
  state.step += 1;
  const auto& c = state.config;
  const double bc1 = 1.0 - std::pow(c.beta1, static_cast<double>(state.step));
  const double bc2 = 1.0 - std::pow(c.beta2, static_cast<double>(state.step));
  for (std::size_t pi = 0; pi < params.size(); ++pi) {
    auto& value = params[pi].mutable_data();
    const auto& g = *grads[pi];
    if (g.size() != value.size()) {
      throw std::invalid_argument("adam_step: gradient shape mismatch for parameter " +
                                  std::to_string(pi));
    }
    auto& m = state.first_moment[pi];
    auto& v = state.second_moment[pi];
    for (std::size_t i = 0; i < value.size(); ++i) {
      m[i] = c.beta1 * m[i] + (1.0 - c.beta1) * g[i];
      v[i] = c.beta2 * v[i] + (1.0 - c.beta2) * g[i] * g[i];
      const double mhat = m[i] / bc1;
      const double vhat = v[i] / bc2;
      value[i] -= c.alpha * mhat / (std::sqrt(vhat) + c.epsilon);
    }
  }
}

void adam_step(std::vector<Tensor>& params, AdamState& state) {
  std::vector<const std::vector<double>*> grads;
  grads.reserve(params.size());
  for (auto& p : params) grads.push_back(&p.grad());
  adam_step(params, grads, state);
}

}  // namespace interformer
