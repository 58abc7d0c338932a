#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "core/attention.hpp"
#include "core/checkpoint.hpp"
#include "core/skeleton.hpp"
#include "core/tensor.hpp"

namespace interformer {

struct ModelConfig {
  std::size_t joint_count = 9;
  std::size_t n_layers = 6;
  std::size_t temporal_heads = 3;
  std::size_t spatial_heads = 3;
  std::size_t ffn_hidden = 0;  // 0 selects 4 * feature_size()
  bool use_spatial = true;
  bool use_adjacency = true;
  bool use_distance = true;
  MaskMode mask_mode = MaskMode::kPostSoftmax;
  AdjacencyHops adjacency_hops = AdjacencyHops::kOneHop;
  double eos_sentinel = 5.0;

  std::size_t feature_size() const { return 3 * joint_count; }
  std::size_t ffn_size() const { return ffn_hidden > 0 ? ffn_hidden : 4 * feature_size(); }

  void validate() const;

  // Ablation ladder: 1 = temporal-only transformer, 2 = + spatial attention,
  // 3 = + adjacency mask, 4 = + interaction distance (the full model).
  ModelConfig with_ablation_setup(int setup) const;

  nlohmann::json to_json() const;
  static ModelConfig from_json(const nlohmann::json& j);
};

struct LayerNormParams {
  Tensor gain;
  Tensor bias;
};

struct AttentionModuleParams {
  std::vector<AttentionHeadParams> heads;
  LayerNormParams norm_in;
  LayerNormParams norm_out;
};

struct FeedForwardParams {
  Tensor w1;  // hidden x d
  Tensor w2;  // d x hidden
  LayerNormParams norm_in;
};

struct EncoderLayerParams {
  AttentionModuleParams self_spatial;
  AttentionModuleParams self_temporal;
  FeedForwardParams ffn;
};

struct DecoderLayerParams {
  AttentionModuleParams self_spatial;
  AttentionModuleParams self_temporal;
  AttentionModuleParams inter_spatial;
  AttentionModuleParams inter_temporal;
  FeedForwardParams ffn;
};

// Flattens a motion sequence into a d x T tensor, one column per frame,
// features in joint-major order.
Tensor sequence_to_tensor(const MotionSequence& seq);
// Reads column `t` of a d x T matrix back into a pose.
Pose column_to_pose(const Tensor& matrix, std::size_t t);

struct TeacherForcedResult {
  Tensor prediction;  // d x (T + 1)
  Tensor target;      // d x (T + 1): the reaction frames plus one sentinel frame
};

class InterFormerModel {
 public:
  InterFormerModel(ModelConfig config, std::uint64_t seed);

  const ModelConfig& config() const { return config_; }

  // Runs the encoder stack over the action. `encoder_noise`, when given, is a
  // d x T matrix added to the first layer's state right before its
  // feed-forward block (multimodal generation).
  Tensor encode(const MotionSequence& action, const AdjacencyMasks& masks,
                const std::vector<double>* encoder_noise = nullptr) const;

  // Decoder stack plus the final linear map. `reaction_input` may have at
  // most one frame more than the action (the slot the sentinel target
  // occupies during teacher forcing); that frame pairs with the final action
  // frame.
  Tensor decode(const MotionSequence& reaction_input, const Tensor& encoded,
                const MotionSequence& action, const AdjacencyMasks& masks) const;

  // Shifts the reaction right by one frame (first frame doubles as the start
  // token) and predicts every reaction frame plus the end sentinel.
  // `decoder_input` (length T + 1), when given, replaces the shifted
  // ground-truth input while the targets stay clean; used for
  // denoising-style teacher forcing.
  TeacherForcedResult forward_teacher_forced(const InteractionSample& sample,
                                             const AdjacencyMasks& masks,
                                             const MotionSequence* decoder_input = nullptr) const;

  // Stable name -> parameter view; the order defines checkpoint layout and
  // optimizer slot order.
  std::vector<std::pair<std::string, Tensor>> named_parameters() const;
  std::vector<Tensor> parameters() const;
  void zero_grad() const;

  // Checkpoint plus a JSON config sidecar at path + ".json". `extra` entries
  // (e.g. optimizer state) are appended after the model parameters.
  void save(const std::string& path, const std::vector<CheckpointEntry>& extra = {},
            const nlohmann::json& meta = nlohmann::json::object()) const;
  static InterFormerModel load(const std::string& path, Checkpoint* raw_out = nullptr);

 private:
  void init_parameters(std::uint64_t seed);
  Tensor encoder_layer_forward(const Tensor& state, const EncoderLayerParams& layer,
                               const AdjacencyMasks& masks,
                               const std::vector<double>* noise) const;
  Tensor decoder_layer_forward(const Tensor& state, const DecoderLayerParams& layer,
                               const Tensor& encoded, const MotionSequence& action,
                               const MotionSequence& reaction_input,
                               const AdjacencyMasks& masks) const;

  ModelConfig config_;
  std::vector<EncoderLayerParams> encoder_layers_;
  std::vector<DecoderLayerParams> decoder_layers_;
  Tensor output_map_;  // d x d
};

}  // namespace interformer
