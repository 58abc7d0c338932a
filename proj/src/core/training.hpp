#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "core/adam.hpp"
#include "core/dataset_io.hpp"
#include "core/model.hpp"
#include "core/tensor.hpp"

namespace interformer {

// Mean over frames and joints of the squared joint displacement, the three
// coordinates of a joint summed. Inputs are d x T with d divisible by 3.
Tensor sequence_loss(const Tensor& generated, const Tensor& target);

// Penalizes the mismatch of the frame-1 to frame-2 motion; invariant under a
// constant translation of the generated sequence. Requires T >= 2.
Tensor first_frame_loss(const Tensor& generated, const Tensor& target);

struct TrainConfig {
  std::size_t batch_size = 128;
  std::size_t steps = 1000;
  AdamConfig adam;
  double lambda_ff = 1.0;  // weight on the first-frame loss
  // Seeded Gaussian jitter applied to the teacher-forced decoder input (the
  // targets stay clean). Teaches the decoder to pull its own slightly-off
  // frames back toward the data, which free-running generation depends on.
  double input_noise_sd = 0.0;
  std::uint64_t seed = 1;
  std::size_t checkpoint_every = 0;  // 0 = only the final checkpoint
  std::string checkpoint_path;       // empty = never write checkpoints
};

struct TrainLogEntry {
  std::size_t step = 0;
  double sequence_loss = 0.0;
  double first_frame_loss = 0.0;
  double total = 0.0;
  double seconds = 0.0;
};

struct TrainLog {
  std::vector<TrainLogEntry> entries;

  void append_csv(const std::string& path, bool truncate) const;
  void write_csv(const std::string& path) const { append_csv(path, true); }
};

struct TrainOutput {
  TrainLog log;
  AdamState adam;
};

// Optimizer-state checkpoint entries ("adam.m.<name>", "adam.v.<name>")
// matching the model's parameter order.
std::vector<CheckpointEntry> adam_state_entries(const AdamState& state,
                                                const InterFormerModel& model);
// Restores optimizer state from a checkpoint; returns false when the
// checkpoint carries no optimizer entries (fresh state).
bool restore_adam_state(AdamState& state, const Checkpoint& ckpt, const InterFormerModel& model);

// Minimizes sequence_loss + lambda_ff * first_frame_loss with Adam over
// seeded same-length mini-batches. The batch schedule is a pure function of
// (seed, dataset, batch size, step), so training resumed from a checkpoint
// replays the uninterrupted run exactly. `resume` carries the optimizer
// state (with its step counter) of a previous run; training continues until
// config.steps total steps have been taken.
TrainOutput train_model(InterFormerModel& model, const Dataset& dataset,
                        const TrainConfig& config, const AdamState* resume = nullptr);

}  // namespace interformer
