#include "core/training.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <map>
#include <stdexcept>

#include "core/rng.hpp"

namespace interformer {

Tensor sequence_loss(const Tensor& generated, const Tensor& target) {
  if (generated.shape() != target.shape()) {
    throw std::invalid_argument("sequence_loss: shape mismatch");
  }
  const std::size_t d = generated.rows();
  const std::size_t t_len = generated.cols();
  if (d % 3 != 0) throw std::invalid_argument("sequence_loss: feature size must be 3k");
  const std::size_t k = d / 3;
  Tensor diff = sub(generated, target);
  return scale(sum(mul(diff, diff)),
               1.0 / (static_cast<double>(t_len) * static_cast<double>(k)));
}

Tensor first_frame_loss(const Tensor& generated, const Tensor& target) {
  if (generated.shape() != target.shape()) {
    throw std::invalid_argument("first_frame_loss: shape mismatch");
  }
  if (generated.cols() < 2) {
    throw std::invalid_argument("first_frame_loss: at least two frames required");
  }
  const std::size_t d = generated.rows();
  if (d % 3 != 0) throw std::invalid_argument("first_frame_loss: feature size must be 3k");
  const std::size_t k = d / 3;
  Tensor gen_delta = sub(slice(generated, 1, 1, 1), slice(generated, 1, 0, 1));
  Tensor real_delta = sub(slice(target, 1, 1, 1), slice(target, 1, 0, 1));
  Tensor diff = sub(real_delta, gen_delta);
  return scale(sum(mul(diff, diff)), 1.0 / static_cast<double>(k));
}

void TrainLog::append_csv(const std::string& path, bool truncate) const {
  std::ofstream out(path, truncate ? std::ios::trunc : std::ios::app);
  if (!out) throw std::runtime_error("train log: cannot open '" + path + "'");
  if (truncate) out << "step,sequence_loss,first_frame_loss,total_loss,seconds\n";
  out.precision(17);
  for (const auto& e : entries) {
    out << e.step << ',' << e.sequence_loss << ',' << e.first_frame_loss << ',' << e.total << ','
        << e.seconds << '\n';
  }
}

std::vector<CheckpointEntry> adam_state_entries(const AdamState& state,
                                                const InterFormerModel& model) {
  std::vector<CheckpointEntry> entries;
  const auto named = model.named_parameters();
  if (named.size() != state.first_moment.size()) {
    throw std::invalid_argument("adam_state_entries: state does not match the model");
  }
  for (std::size_t i = 0; i < named.size(); ++i) {
    entries.push_back({"adam.m." + named[i].first, named[i].second.shape(),
                       state.first_moment[i]});
    entries.push_back({"adam.v." + named[i].first, named[i].second.shape(),
                       state.second_moment[i]});
  }
  return entries;
}

bool restore_adam_state(AdamState& state, const Checkpoint& ckpt, const InterFormerModel& model) {
  const auto named = model.named_parameters();
  if (!ckpt.find("adam.m." + named[0].first)) return false;
  for (std::size_t i = 0; i < named.size(); ++i) {
    const CheckpointEntry* m = ckpt.find("adam.m." + named[i].first);
    const CheckpointEntry* v = ckpt.find("adam.v." + named[i].first);
    if (!m || !v || m->values.size() != named[i].second.numel()) {
      throw std::runtime_error("optimizer state in checkpoint does not match the model");
    }
    state.first_moment[i] = m->values;
    state.second_moment[i] = v->values;
  }
  if (ckpt.meta.contains("step")) state.step = ckpt.meta.at("step").get<std::uint64_t>();
  return true;
}

namespace {

// Same-length batches for one epoch; a pure function of (seed, epoch,
// lengths, batch size). Groups keep dataset order before their seeded
// shuffle, and the final batch list is shuffled as a whole.
std::vector<std::vector<std::size_t>> epoch_batches(const Dataset& dataset,
                                                    std::size_t batch_size, std::uint64_t seed,
                                                    std::uint64_t epoch) {
  std::map<std::size_t, std::vector<std::size_t>> groups;
  for (std::size_t i = 0; i < dataset.samples.size(); ++i) {
    groups[dataset.samples[i].action.length()].push_back(i);
  }
  Rng rng = Rng(seed).derive(0x6b17c000ULL + epoch);
  std::vector<std::vector<std::size_t>> batches;
  for (auto& [length, indices] : groups) {
    for (std::size_t i = indices.size(); i > 1; --i) {
      const auto j = static_cast<std::size_t>(rng.uniform_int(0, static_cast<std::int64_t>(i) - 1));
      std::swap(indices[i - 1], indices[j]);
    }
    for (std::size_t start = 0; start < indices.size(); start += batch_size) {
      const std::size_t end = std::min(start + batch_size, indices.size());
      batches.emplace_back(indices.begin() + static_cast<std::ptrdiff_t>(start),
                           indices.begin() + static_cast<std::ptrdiff_t>(end));
    }
  }
  for (std::size_t i = batches.size(); i > 1; --i) {
    const auto j = static_cast<std::size_t>(rng.uniform_int(0, static_cast<std::int64_t>(i) - 1));
    std::swap(batches[i - 1], batches[j]);
  }
  return batches;
}

}  // namespace

TrainOutput train_model(InterFormerModel& model, const Dataset& dataset,
                        const TrainConfig& config, const AdamState* resume) {
  if (dataset.samples.empty()) throw std::invalid_argument("train: empty dataset");
  if (config.batch_size < 1) throw std::invalid_argument("train: batch_size must be >= 1");
  if (config.lambda_ff < 0.0) throw std::invalid_argument("train: lambda_ff must be >= 0");
  for (const auto& sample : dataset.samples) {
    if (sample.action.joint_count() != model.config().joint_count) {
      throw std::invalid_argument("train: dataset topology does not match the model");
    }
  }

  const AdjacencyMasks masks =
      build_adjacency_masks(dataset.topology, model.config().adjacency_hops);
  auto params = model.parameters();

  TrainOutput output;
  output.adam = resume ? *resume : make_adam_state(params, config.adam);
  output.adam.config = config.adam;
  if (output.adam.first_moment.size() != params.size()) {
    throw std::invalid_argument("train: resume state does not match the model");
  }

  const std::size_t batches_per_epoch =
      epoch_batches(dataset, config.batch_size, config.seed, 0).size();
  std::vector<std::vector<std::size_t>> batches;
  std::uint64_t cached_epoch = static_cast<std::uint64_t>(-1);

  const auto started = std::chrono::steady_clock::now();
  while (output.adam.step < config.steps) {
    const std::uint64_t step_index = output.adam.step;  // 0-based
    const std::uint64_t epoch = step_index / batches_per_epoch;
    const std::size_t batch_index = step_index % batches_per_epoch;
    if (epoch != cached_epoch) {
      batches = epoch_batches(dataset, config.batch_size, config.seed, epoch);
      cached_epoch = epoch;
    }
    const auto& batch = batches[batch_index];

    model.zero_grad();
    double ls_value = 0.0, lff_value = 0.0;
    Tensor total;
    Rng noise_rng = Rng(config.seed).derive(0xd3c0de00ULL + step_index);
    for (const std::size_t index : batch) {
      const InteractionSample& sample = dataset.samples[index];
      MotionSequence noisy_input;
      const MotionSequence* decoder_input = nullptr;
      if (config.input_noise_sd > 0.0) {
        noisy_input.frame_rate = sample.reaction.frame_rate;
        noisy_input.frames.push_back(sample.reaction.frames[0]);
        for (std::size_t t = 0; t < sample.reaction.length(); ++t) {
          noisy_input.frames.push_back(sample.reaction.frames[t]);
        }
        for (auto& frame : noisy_input.frames) {
          for (auto& c : frame.coords) c += noise_rng.normal(0.0, config.input_noise_sd);
        }
        decoder_input = &noisy_input;
      }
      auto fwd = model.forward_teacher_forced(sample, masks, decoder_input);
      Tensor ls = sequence_loss(fwd.prediction, fwd.target);
      Tensor lff = first_frame_loss(fwd.prediction, fwd.target);
      ls_value += ls.value();
      lff_value += lff.value();
      Tensor sample_total = add(ls, scale(lff, config.lambda_ff));
      total = total.defined() ? add(total, sample_total) : sample_total;
    }
    total = scale(total, 1.0 / static_cast<double>(batch.size()));
    ls_value /= static_cast<double>(batch.size());
    lff_value /= static_cast<double>(batch.size());

    const double total_value = total.value();
    if (!std::isfinite(total_value)) {
      throw std::runtime_error("train: non-finite loss at step " +
                               std::to_string(step_index + 1));
    }
    total.backward();
    adam_step(params, output.adam);

    TrainLogEntry entry;
    entry.step = output.adam.step;
    entry.sequence_loss = ls_value;
    entry.first_frame_loss = lff_value;
    entry.total = total_value;
    entry.seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
    output.log.entries.push_back(entry);

    const bool at_checkpoint = config.checkpoint_every > 0 &&
                               output.adam.step % config.checkpoint_every == 0;
    if (!config.checkpoint_path.empty() &&
        (at_checkpoint || output.adam.step == config.steps)) {
      model.save(config.checkpoint_path, adam_state_entries(output.adam, model),
                 {{"step", output.adam.step}, {"seed", config.seed}});
    }
  }
  if (!config.checkpoint_path.empty()) {
    model.save(config.checkpoint_path, adam_state_entries(output.adam, model),
               {{"step", output.adam.step}, {"seed", config.seed}});
  }
  return output;
}

}  // namespace interformer
