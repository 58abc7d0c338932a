#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "core/dataset_io.hpp"
#include "core/skeleton.hpp"

namespace interformer {

// Built-in interaction classes with geometrically distinct reactions:
//   push     - action arm extends, reaction root translates backward (-x)
//   wave     - action arm oscillates, reaction arm oscillates 3 frames later
//   kick     - action leg extends, reaction root translates back and tilts
//   approach - both roots translate toward each other
//   still    - reaction stays put
const std::vector<std::string>& synth_class_names();

struct SynthConfig {
  std::vector<std::string> classes = synth_class_names();
  std::size_t samples_per_class = 40;
  std::size_t joint_count = 9;  // k >= 5
  std::size_t t_min = 14;
  std::size_t t_max = 28;
  double noise_sd = 0.01;
  double frame_rate = 15.0;
  std::uint64_t seed = 1;
};

// Simple humanoid-ish tree used by the generator: root, spine, head, hand,
// foot, then a second hand/foot and extra spine segments as k grows.
SkeletonTopology make_synth_topology(std::size_t joint_count);

// Deterministic in the seed; two calls with equal configs produce identical
// datasets.
Dataset synthesize_dataset(const SynthConfig& config);

}  // namespace interformer
