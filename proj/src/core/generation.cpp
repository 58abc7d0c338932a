#include "core/generation.hpp"

#include <cmath>
#include <stdexcept>

#include "core/rng.hpp"

namespace interformer {

namespace {

bool is_sentinel_pose(const Pose& pose, double sentinel, double threshold) {
  double deviation = 0.0;
  for (double c : pose.coords) deviation += std::abs(c - sentinel);
  deviation /= static_cast<double>(pose.coords.size());
  return deviation < threshold;
}

std::vector<double> draw_noise(std::size_t n, double sd, Rng& rng) {
  std::vector<double> noise(n);
  for (auto& v : noise) v = rng.normal(0.0, sd);
  return noise;
}

MotionSequence generate_impl(const InterFormerModel& model, const MotionSequence& action,
                             const Pose& first_frame, const GenConfig& config,
                             const AdjacencyMasks& masks,
                             const std::vector<double>* encoder_noise, GenStats* stats) {
  if (action.length() < 1) throw std::invalid_argument("generate: empty action");
  if (first_frame.joint_count() != model.config().joint_count) {
    throw std::invalid_argument("generate: first frame topology does not match the model");
  }
  const double sentinel = model.config().eos_sentinel;
  const double threshold =
      config.eos_threshold > 0.0 ? config.eos_threshold : 0.5 * std::abs(sentinel);
  const std::size_t cap = config.max_len > 0 ? std::min(config.max_len, action.length())
                                             : action.length();

  Tensor encoded = model.encode(action, masks, encoder_noise);

  MotionSequence decoder_input;
  decoder_input.frame_rate = action.frame_rate;
  decoder_input.frames.push_back(first_frame);

  MotionSequence out;
  out.frame_rate = action.frame_rate;
  if (stats) *stats = GenStats{};
  while (true) {
    Tensor prediction = model.decode(decoder_input, encoded, action, masks);
    Pose newest = column_to_pose(prediction, prediction.cols() - 1);
    for (double c : newest.coords) {
      if (!std::isfinite(c)) {
        throw std::runtime_error("generate: non-finite prediction at step " +
                                 std::to_string(out.length() + 1));
      }
    }
    if (is_sentinel_pose(newest, sentinel, threshold)) {
      if (stats) stats->stopped_by_eos = true;
      break;
    }
    out.frames.push_back(newest);
    if (out.length() >= cap) break;
    decoder_input.frames.push_back(std::move(newest));
  }
  if (stats) stats->generated_frames = out.length();
  return out;
}

}  // namespace

MotionSequence generate(const InterFormerModel& model, const MotionSequence& action,
                        const Pose& first_frame, const GenConfig& config,
                        const AdjacencyMasks& masks, GenStats* stats) {
  if (config.noise_sd > 0.0) {
    Rng rng(config.seed);
    const std::size_t n = model.config().feature_size() * action.length();
    const auto noise = draw_noise(n, config.noise_sd, rng);
    return generate_impl(model, action, first_frame, config, masks, &noise, stats);
  }
  return generate_impl(model, action, first_frame, config, masks, nullptr, stats);
}

MotionSequence generate_long(const InterFormerModel& model, const MotionSequence& action,
                             const Pose& first_frame, const GenConfig& config,
                             const AdjacencyMasks& masks) {
  if (config.chunk_len < 2) throw std::invalid_argument("generate_long: chunk_len must be >= 2");
  const std::size_t total = action.length();
  const std::size_t budget = config.max_len > 0 ? config.max_len : total;

  MotionSequence out;
  out.frame_rate = action.frame_rate;
  Pose seed_frame = first_frame;
  for (std::size_t start = 0; start < total && out.length() < budget;
       start += config.chunk_len) {
    const std::size_t end = std::min(start + config.chunk_len, total);
    MotionSequence window;
    window.frame_rate = action.frame_rate;
    window.frames.assign(action.frames.begin() + static_cast<std::ptrdiff_t>(start),
                         action.frames.begin() + static_cast<std::ptrdiff_t>(end));
    GenConfig window_config = config;
    window_config.max_len = std::min(end - start, budget - out.length());
    MotionSequence part = generate(model, window, seed_frame, window_config, masks);
    if (!part.frames.empty()) seed_frame = part.frames.back();
    for (auto& frame : part.frames) out.frames.push_back(std::move(frame));
  }
  return out;
}

std::vector<MotionSequence> generate_diverse(const InterFormerModel& model,
                                             const MotionSequence& action,
                                             const Pose& first_frame, const GenConfig& config,
                                             const AdjacencyMasks& masks,
                                             std::size_t n_samples) {
  if (config.noise_sd <= 0.0) {
    throw std::invalid_argument("generate_diverse: noise_sd must be positive");
  }
  const std::size_t n = model.config().feature_size() * action.length();
  std::vector<MotionSequence> out;
  out.reserve(n_samples);
  Rng base(config.seed);
  for (std::size_t i = 0; i < n_samples; ++i) {
    Rng rng = base.derive(i + 1);
    const auto noise = draw_noise(n, config.noise_sd, rng);
    out.push_back(generate_impl(model, action, first_frame, config, masks, &noise, nullptr));
  }
  return out;
}

MotionSequence zero_velocity_baseline(const Pose& first_frame, std::size_t length,
                                      double frame_rate) {
  if (length < 1) throw std::invalid_argument("zero_velocity_baseline: length must be >= 1");
  MotionSequence out;
  out.frame_rate = frame_rate;
  out.frames.assign(length, first_frame);
  return out;
}

}  // namespace interformer
