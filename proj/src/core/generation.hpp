#pragma once

#include <cstdint>
#include <vector>

#include "core/model.hpp"
#include "core/skeleton.hpp"

namespace interformer {

struct GenConfig {
  std::size_t max_len = 0;      // 0 = length of the input action
  double eos_threshold = 0.0;   // <= 0 selects 0.5 * |eos_sentinel|
  double noise_sd = 0.0;        // 0 = deterministic
  std::size_t chunk_len = 50;   // long-sequence window
  std::uint64_t seed = 1;
};

struct GenStats {
  bool stopped_by_eos = false;      // false = the action length / max_len cap hit first
  std::size_t generated_frames = 0;
};

// Greedy one-frame-at-a-time decoding seeded with the reaction's first
// frame. Stops on the end-of-sequence sentinel or after
// min(len(action), max_len) frames, whichever comes first; the sentinel
// frame itself is never returned.
MotionSequence generate(const InterFormerModel& model, const MotionSequence& action,
                        const Pose& first_frame, const GenConfig& config,
                        const AdjacencyMasks& masks, GenStats* stats = nullptr);

// Splits the action into consecutive chunk_len windows and generates each
// one; from the second window on, the seed frame is the last frame generated
// for the previous window.
MotionSequence generate_long(const InterFormerModel& model, const MotionSequence& action,
                             const Pose& first_frame, const GenConfig& config,
                             const AdjacencyMasks& masks);

// Draws n_samples reactions by injecting zero-mean Gaussian noise into the
// encoder state before the first layer's feed-forward block. Requires
// noise_sd > 0; sample i uses the sub-stream derive(seed, i), so the list is
// reproducible.
std::vector<MotionSequence> generate_diverse(const InterFormerModel& model,
                                             const MotionSequence& action,
                                             const Pose& first_frame, const GenConfig& config,
                                             const AdjacencyMasks& masks,
                                             std::size_t n_samples);

// The no-motion reference: the seed pose repeated for the whole sequence.
MotionSequence zero_velocity_baseline(const Pose& first_frame, std::size_t length,
                                      double frame_rate = 30.0);

}  // namespace interformer
