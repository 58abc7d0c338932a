#include "core/model.hpp"

#include "core/errors.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <stdexcept>

#include "core/rng.hpp"

namespace interformer {

namespace {

std::string mask_mode_name(MaskMode mode) {
  return mode == MaskMode::kPostSoftmax ? "post_softmax" : "pre_softmax";
}

MaskMode mask_mode_from_name(const std::string& name) {
  if (name == "post_softmax") return MaskMode::kPostSoftmax;
  if (name == "pre_softmax") return MaskMode::kPreSoftmax;
  throw std::invalid_argument("model config: unknown mask_mode '" + name + "'");
}

std::string hops_name(AdjacencyHops hops) {
  return hops == AdjacencyHops::kOneHop ? "one" : "path";
}

AdjacencyHops hops_from_name(const std::string& name) {
  if (name == "one") return AdjacencyHops::kOneHop;
  if (name == "path") return AdjacencyHops::kPath;
  throw std::invalid_argument("model config: unknown adjacency_hops '" + name + "'");
}

void check_finite(const MotionSequence& seq, const char* what) {
  for (const auto& frame : seq.frames) {
    for (double c : frame.coords) {
      if (!std::isfinite(c)) {
        throw std::invalid_argument(std::string(what) + ": non-finite coordinate");
      }
    }
  }
}

// Sinusoidal table that tolerates odd feature sizes by computing one spare
// row and dropping it.
std::vector<double> position_table(std::size_t t_len, std::size_t d) {
  const std::size_t padded = d % 2 == 0 ? d : d + 1;
  Tensor pe = positional_encoding(t_len, padded);
  std::vector<double> out(d * t_len);
  std::copy(pe.data().begin(), pe.data().begin() + static_cast<std::ptrdiff_t>(d * t_len),
            out.begin());
  return out;
}

}  // namespace

void ModelConfig::validate() const {
  if (joint_count < 2) throw std::invalid_argument("model config: joint_count must be >= 2");
  if (n_layers < 1) throw std::invalid_argument("model config: n_layers must be >= 1");
  if (temporal_heads < 1 || feature_size() % temporal_heads != 0) {
    throw std::invalid_argument("model config: temporal_heads must divide the feature size " +
                                std::to_string(feature_size()));
  }
  if (spatial_heads != 1 && spatial_heads != 3) {
    throw std::invalid_argument("model config: spatial_heads must be 1 or 3");
  }
  if ((use_adjacency || use_distance) && !use_spatial) {
    throw std::invalid_argument(
        "model config: adjacency mask / distance bias require use_spatial");
  }
  if (eos_sentinel == 0.0) {
    throw std::invalid_argument("model config: eos_sentinel must be nonzero");
  }
}

ModelConfig ModelConfig::with_ablation_setup(int setup) const {
  ModelConfig c = *this;
  switch (setup) {
    case 1:
      c.use_spatial = false;
      c.use_adjacency = false;
      c.use_distance = false;
      break;
    case 2:
      c.use_spatial = true;
      c.use_adjacency = false;
      c.use_distance = false;
      break;
    case 3:
      c.use_spatial = true;
      c.use_adjacency = true;
      c.use_distance = false;
      break;
    case 4:
      c.use_spatial = true;
      c.use_adjacency = true;
      c.use_distance = true;
      break;
    default:
      throw std::invalid_argument("ablation setup must be 1..4");
  }
  return c;
}

nlohmann::json ModelConfig::to_json() const {
  return nlohmann::json{{"joint_count", joint_count},
                        {"n_layers", n_layers},
                        {"temporal_heads", temporal_heads},
                        {"spatial_heads", spatial_heads},
                        {"ffn_hidden", ffn_hidden},
                        {"use_spatial", use_spatial},
                        {"use_adjacency", use_adjacency},
                        {"use_distance", use_distance},
                        {"mask_mode", mask_mode_name(mask_mode)},
                        {"adjacency_hops", hops_name(adjacency_hops)},
                        {"eos_sentinel", eos_sentinel}};
}

ModelConfig ModelConfig::from_json(const nlohmann::json& j) {
  ModelConfig c;
  for (const auto& [key, value] : j.items()) {
    if (key == "joint_count") {
      c.joint_count = value.get<std::size_t>();
    } else if (key == "n_layers") {
      c.n_layers = value.get<std::size_t>();
    } else if (key == "temporal_heads") {
      c.temporal_heads = value.get<std::size_t>();
    } else if (key == "spatial_heads") {
      c.spatial_heads = value.get<std::size_t>();
    } else if (key == "ffn_hidden") {
      c.ffn_hidden = value.get<std::size_t>();
    } else if (key == "use_spatial") {
      c.use_spatial = value.get<bool>();
    } else if (key == "use_adjacency") {
      c.use_adjacency = value.get<bool>();
    } else if (key == "use_distance") {
      c.use_distance = value.get<bool>();
    } else if (key == "mask_mode") {
      c.mask_mode = mask_mode_from_name(value.get<std::string>());
    } else if (key == "adjacency_hops") {
      c.adjacency_hops = hops_from_name(value.get<std::string>());
    } else if (key == "eos_sentinel") {
      c.eos_sentinel = value.get<double>();
    } else {
      throw std::invalid_argument("model config: unknown key '" + key + "'");
    }
  }
  c.validate();
  return c;
}

Tensor sequence_to_tensor(const MotionSequence& seq) {
  if (seq.frames.empty()) throw std::invalid_argument("sequence_to_tensor: empty sequence");
  const std::size_t d = 3 * seq.joint_count();
  const std::size_t t_len = seq.length();
  std::vector<double> data(d * t_len);
  for (std::size_t t = 0; t < t_len; ++t) {
    const auto& coords = seq.frames[t].coords;
    if (coords.size() != d) {
      throw std::invalid_argument("sequence_to_tensor: inconsistent joint count at frame " +
                                  std::to_string(t));
    }
    for (std::size_t f = 0; f < d; ++f) data[f * t_len + t] = coords[f];
  }
  return Tensor::from_data({d, t_len}, std::move(data));
}

Pose column_to_pose(const Tensor& matrix, std::size_t t) {
  Pose pose;
  const std::size_t d = matrix.rows();
  pose.coords.resize(d);
  for (std::size_t f = 0; f < d; ++f) pose.coords[f] = matrix.at(f, t);
  return pose;
}

// --- parameter construction -------------------------------------------------

namespace {

Tensor init_weight(std::size_t rows, std::size_t cols, std::size_t fan_in, std::size_t fan_out,
                   Rng& rng) {
  const double bound = std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
  std::vector<double> data(rows * cols);
  for (auto& v : data) v = rng.uniform(-bound, bound);
  return Tensor::from_data({rows, cols}, std::move(data), true);
}

LayerNormParams init_norm(std::size_t d) {
  LayerNormParams norm;
  norm.gain = Tensor::from_data({d}, std::vector<double>(d, 1.0), true);
  norm.bias = Tensor::from_data({d}, std::vector<double>(d, 0.0), true);
  return norm;
}

AttentionModuleParams init_attention_module(std::size_t dim, std::size_t n_heads, std::size_t d,
                                            Rng& rng) {
  AttentionModuleParams module;
  const std::size_t width = dim / n_heads;
  for (std::size_t h = 0; h < n_heads; ++h) {
    AttentionHeadParams head;
    head.w_q = init_weight(width, width, width, width, rng);
    head.w_k = init_weight(width, width, width, width, rng);
    head.w_v = init_weight(width, width, width, width, rng);
    module.heads.push_back(std::move(head));
  }
  module.norm_in = init_norm(d);
  module.norm_out = init_norm(d);
  return module;
}

FeedForwardParams init_ffn(std::size_t d, std::size_t hidden, Rng& rng) {
  FeedForwardParams ffn;
  ffn.w1 = init_weight(hidden, d, d, hidden, rng);
  ffn.w2 = init_weight(d, hidden, hidden, d, rng);
  ffn.norm_in = init_norm(d);
  return ffn;
}

void collect_module(const std::string& prefix, const AttentionModuleParams& module,
                    std::vector<std::pair<std::string, Tensor>>& out) {
  for (std::size_t h = 0; h < module.heads.size(); ++h) {
    const std::string hp = prefix + ".h" + std::to_string(h);
    out.emplace_back(hp + ".wq", module.heads[h].w_q);
    out.emplace_back(hp + ".wk", module.heads[h].w_k);
    out.emplace_back(hp + ".wv", module.heads[h].w_v);
  }
  out.emplace_back(prefix + ".norm_in.gain", module.norm_in.gain);
  out.emplace_back(prefix + ".norm_in.bias", module.norm_in.bias);
  out.emplace_back(prefix + ".norm_out.gain", module.norm_out.gain);
  out.emplace_back(prefix + ".norm_out.bias", module.norm_out.bias);
}

void collect_ffn(const std::string& prefix, const FeedForwardParams& ffn,
                 std::vector<std::pair<std::string, Tensor>>& out) {
  out.emplace_back(prefix + ".w1", ffn.w1);
  out.emplace_back(prefix + ".w2", ffn.w2);
  out.emplace_back(prefix + ".norm.gain", ffn.norm_in.gain);
  out.emplace_back(prefix + ".norm.bias", ffn.norm_in.bias);
}

}  // namespace

InterFormerModel::InterFormerModel(ModelConfig config, std::uint64_t seed)
    : config_(std::move(config)) {
  config_.validate();
  init_parameters(seed);
}

void InterFormerModel::init_parameters(std::uint64_t seed) {
  Rng rng(seed ^ 0x1f2e3d4c5b6a7988ULL);
  const std::size_t d = config_.feature_size();
  const std::size_t hidden = config_.ffn_size();
  for (std::size_t i = 0; i < config_.n_layers; ++i) {
    EncoderLayerParams layer;
    layer.self_spatial = init_attention_module(3, config_.spatial_heads, d, rng);
    layer.self_temporal = init_attention_module(d, config_.temporal_heads, d, rng);
    layer.ffn = init_ffn(d, hidden, rng);
    encoder_layers_.push_back(std::move(layer));
  }
  for (std::size_t i = 0; i < config_.n_layers; ++i) {
    DecoderLayerParams layer;
    layer.self_spatial = init_attention_module(3, config_.spatial_heads, d, rng);
    layer.self_temporal = init_attention_module(d, config_.temporal_heads, d, rng);
    layer.inter_spatial = init_attention_module(3, config_.spatial_heads, d, rng);
    layer.inter_temporal = init_attention_module(d, config_.temporal_heads, d, rng);
    layer.ffn = init_ffn(d, hidden, rng);
    decoder_layers_.push_back(std::move(layer));
  }
  output_map_ = init_weight(d, d, d, d, rng);
}

std::vector<std::pair<std::string, Tensor>> InterFormerModel::named_parameters() const {
  std::vector<std::pair<std::string, Tensor>> out;
  for (std::size_t i = 0; i < encoder_layers_.size(); ++i) {
    const std::string p = "enc." + std::to_string(i);
    collect_module(p + ".sspat", encoder_layers_[i].self_spatial, out);
    collect_module(p + ".stemp", encoder_layers_[i].self_temporal, out);
    collect_ffn(p + ".ffn", encoder_layers_[i].ffn, out);
  }
  for (std::size_t i = 0; i < decoder_layers_.size(); ++i) {
    const std::string p = "dec." + std::to_string(i);
    collect_module(p + ".sspat", decoder_layers_[i].self_spatial, out);
    collect_module(p + ".stemp", decoder_layers_[i].self_temporal, out);
    collect_module(p + ".ispat", decoder_layers_[i].inter_spatial, out);
    collect_module(p + ".itemp", decoder_layers_[i].inter_temporal, out);
    collect_ffn(p + ".ffn", decoder_layers_[i].ffn, out);
  }
  out.emplace_back("out.w", output_map_);
  return out;
}

std::vector<Tensor> InterFormerModel::parameters() const {
  std::vector<Tensor> out;
  for (auto& [name, tensor] : named_parameters()) out.push_back(tensor);
  return out;
}

void InterFormerModel::zero_grad() const {
  for (auto& [name, tensor] : named_parameters()) {
    Tensor t = tensor;
    t.zero_grad();
  }
}

// --- forward ----------------------------------------------------------------

namespace {

Tensor apply_norm(const Tensor& x, const LayerNormParams& norm) {
  return layer_norm(x, norm.gain, norm.bias, 0);
}

// Per-frame spatial attention over a d x T state reshaped into k x 3 frames.
// `memory` (when given) supplies keys/values per frame, clamped to its last
// column when the query side is one frame longer. `dists` (when given) holds
// one k x k matrix per query frame.
Tensor spatial_over_frames(const Tensor& queries, const Tensor* memory,
                           const std::vector<AttentionHeadParams>& heads,
                           const AttentionConfig& att_config, const AdjacencyMasks* masks,
                           const std::vector<std::vector<double>>* dists, std::size_t k) {
  const std::size_t t_len = queries.cols();
  const std::size_t mem_len = memory ? memory->cols() : t_len;
  std::vector<Tensor> columns;
  columns.reserve(t_len);
  for (std::size_t t = 0; t < t_len; ++t) {
    Tensor q_frame = reshape(slice(queries, 1, t, 1), {k, 3});
    Tensor kv_frame = q_frame;
    if (memory) {
      const std::size_t mt = std::min(t, mem_len - 1);
      kv_frame = reshape(slice(*memory, 1, mt, 1), {k, 3});
    }
    const std::vector<double>* dist = dists ? &(*dists)[t] : nullptr;
    Tensor out =
        spatial_attention(q_frame, kv_frame, kv_frame, heads, att_config, masks, dist);
    columns.push_back(reshape(out, {3 * k, 1}));
  }
  return t_len == 1 ? columns[0] : concat(columns, 1);
}

Tensor feed_forward(const Tensor& state, const FeedForwardParams& ffn) {
  Tensor normed = apply_norm(state, ffn.norm_in);
  return add(matmul(ffn.w2, relu(matmul(ffn.w1, normed))), state);
}

}  // namespace

Tensor InterFormerModel::encoder_layer_forward(const Tensor& state,
                                               const EncoderLayerParams& layer,
                                               const AdjacencyMasks& masks,
                                               const std::vector<double>* noise) const {
  const std::size_t k = config_.joint_count;

  Tensor t_in = apply_norm(state, layer.self_temporal.norm_in);
  Tensor t_att = temporal_attention(t_in, t_in, t_in, layer.self_temporal.heads, false);
  Tensor t_out = add(t_att, state);

  Tensor combined = t_out;
  if (config_.use_spatial) {
    AttentionConfig att_config;
    att_config.heads = config_.spatial_heads;
    att_config.use_adjacency_mask = config_.use_adjacency;
    att_config.mask_mode = config_.mask_mode;
    Tensor s_in = apply_norm(state, layer.self_spatial.norm_in);
    Tensor s_att = spatial_over_frames(s_in, nullptr, layer.self_spatial.heads, att_config,
                                       config_.use_adjacency ? &masks : nullptr, nullptr, k);
    Tensor s_out = add(s_att, state);
    combined = add(s_out, t_out);
  }
  if (noise) combined = add_constant(combined, *noise);
  return feed_forward(combined, layer.ffn);
}

Tensor InterFormerModel::encode(const MotionSequence& action, const AdjacencyMasks& masks,
                                const std::vector<double>* encoder_noise) const {
  check_finite(action, "encode");
  if (action.joint_count() != config_.joint_count) {
    throw std::invalid_argument("encode: action joint count does not match the model");
  }
  if (masks.joint_count != config_.joint_count) {
    throw std::invalid_argument("encode: adjacency masks built for a different topology");
  }
  const std::size_t d = config_.feature_size();
  const std::size_t t_len = action.length();
  if (encoder_noise && encoder_noise->size() != d * t_len) {
    throw std::invalid_argument("encode: noise matrix must be d x T");
  }

  Tensor state = sequence_to_tensor(action);
  state = add_constant(state, position_table(t_len, d));
  for (std::size_t i = 0; i < encoder_layers_.size(); ++i) {
    state = encoder_layer_forward(state, encoder_layers_[i], masks,
                                  i == 0 ? encoder_noise : nullptr);
  }
  return state;
}

Tensor InterFormerModel::decoder_layer_forward(const Tensor& state,
                                               const DecoderLayerParams& layer,
                                               const Tensor& encoded,
                                               const MotionSequence& action,
                                               const MotionSequence& reaction_input,
                                               const AdjacencyMasks& masks) const {
  const std::size_t k = config_.joint_count;

  // Self pair: causal over the generated-so-far frames.
  Tensor t_in = apply_norm(state, layer.self_temporal.norm_in);
  Tensor t_att = temporal_attention(t_in, t_in, t_in, layer.self_temporal.heads, true);
  Tensor t_out = add(t_att, state);

  Tensor after_self = t_out;
  if (config_.use_spatial) {
    AttentionConfig att_config;
    att_config.heads = config_.spatial_heads;
    att_config.use_adjacency_mask = config_.use_adjacency;
    att_config.mask_mode = config_.mask_mode;
    Tensor s_in = apply_norm(state, layer.self_spatial.norm_in);
    Tensor s_att = spatial_over_frames(s_in, nullptr, layer.self_spatial.heads, att_config,
                                       config_.use_adjacency ? &masks : nullptr, nullptr, k);
    Tensor s_out = add(s_att, state);
    after_self = add(s_out, t_out);
  }

  // Interaction pair: queries from the decoder stream, keys/values from the
  // encoder output.
  Tensor it_in = apply_norm(after_self, layer.inter_temporal.norm_in);
  Tensor it_att =
      temporal_attention(it_in, encoded, encoded, layer.inter_temporal.heads, false);
  Tensor it_out = add(it_att, after_self);

  Tensor after_inter = it_out;
  if (config_.use_spatial) {
    AttentionConfig att_config;
    att_config.heads = config_.spatial_heads;
    att_config.use_distance_bias = config_.use_distance;
    att_config.mask_mode = config_.mask_mode;
    std::vector<std::vector<double>> dists;
    if (config_.use_distance) {
      const std::size_t t_len = state.cols();
      const std::size_t action_len = action.length();
      dists.reserve(t_len);
      for (std::size_t t = 0; t < t_len; ++t) {
        const std::size_t at = std::min(t, action_len - 1);
        dists.push_back(
            interaction_distance(action.frames[at], reaction_input.frames[t]));
      }
    }
    Tensor is_in = apply_norm(after_self, layer.inter_spatial.norm_in);
    Tensor is_att = spatial_over_frames(is_in, &encoded, layer.inter_spatial.heads, att_config,
                                        nullptr, config_.use_distance ? &dists : nullptr, k);
    Tensor is_out = add(is_att, after_self);
    after_inter = add(is_out, it_out);
  }

  return feed_forward(after_inter, layer.ffn);
}

Tensor InterFormerModel::decode(const MotionSequence& reaction_input, const Tensor& encoded,
                                const MotionSequence& action, const AdjacencyMasks& masks) const {
  check_finite(reaction_input, "decode");
  if (reaction_input.joint_count() != config_.joint_count) {
    throw std::invalid_argument("decode: reaction joint count does not match the model");
  }
  const std::size_t t_in = reaction_input.length();
  const std::size_t t_enc = encoded.cols();
  if (action.length() != t_enc) {
    throw std::invalid_argument("decode: encoder output and action lengths disagree");
  }
  if (t_in > t_enc + 1) {
    throw std::invalid_argument("decode: reaction input has " + std::to_string(t_in) +
                                " frames but the action has only " + std::to_string(t_enc) +
                                "; frame pairing is undefined beyond one slot past the action");
  }

  const std::size_t d = config_.feature_size();
  Tensor state = sequence_to_tensor(reaction_input);
  state = add_constant(state, position_table(t_in, d));
  for (const auto& layer : decoder_layers_) {
    state = decoder_layer_forward(state, layer, encoded, action, reaction_input, masks);
  }
  return matmul(output_map_, state);
}

TeacherForcedResult InterFormerModel::forward_teacher_forced(
    const InteractionSample& sample, const AdjacencyMasks& masks,
    const MotionSequence* decoder_input) const {
  const std::size_t t_len = sample.action.length();
  if (sample.reaction.length() != t_len) {
    throw std::invalid_argument("teacher forcing: action and reaction lengths differ");
  }
  if (t_len < 1) throw std::invalid_argument("teacher forcing: empty sample");

  // Decoder input: first frame as start token, then the reaction shifted
  // right by one. One extra slot so the sentinel frame has a prediction.
  MotionSequence shifted;
  if (decoder_input != nullptr) {
    if (decoder_input->length() != t_len + 1) {
      throw std::invalid_argument("teacher forcing: decoder input must have T + 1 frames");
    }
    shifted = *decoder_input;
  } else {
    shifted.frame_rate = sample.reaction.frame_rate;
    shifted.frames.push_back(sample.reaction.frames[0]);
    for (std::size_t t = 0; t < t_len; ++t) {
      shifted.frames.push_back(sample.reaction.frames[t]);
    }
  }

  const std::size_t d = config_.feature_size();
  std::vector<double> target_data(d * (t_len + 1));
  for (std::size_t t = 0; t < t_len; ++t) {
    for (std::size_t f = 0; f < d; ++f) {
      target_data[f * (t_len + 1) + t] = sample.reaction.frames[t].coords[f];
    }
  }
  for (std::size_t f = 0; f < d; ++f) {
    target_data[f * (t_len + 1) + t_len] = config_.eos_sentinel;
  }

  TeacherForcedResult result;
  result.target = Tensor::from_data({d, t_len + 1}, std::move(target_data));
  Tensor encoded = encode(sample.action, masks);
  result.prediction = decode(shifted, encoded, sample.action, masks);
  return result;
}

// --- checkpointing ----------------------------------------------------------

void InterFormerModel::save(const std::string& path, const std::vector<CheckpointEntry>& extra,
                            const nlohmann::json& meta) const {
  std::vector<CheckpointEntry> entries;
  for (const auto& [name, tensor] : named_parameters()) {
    entries.push_back({name, tensor.shape(), tensor.data()});
  }
  entries.insert(entries.end(), extra.begin(), extra.end());
  write_checkpoint(path, entries, meta);

  std::ofstream sidecar(path + ".json", std::ios::trunc);
  if (!sidecar) throw IoError("model save: cannot write sidecar for '" + path + "'");
  sidecar << config_.to_json().dump(2) << '\n';
}

InterFormerModel InterFormerModel::load(const std::string& path, Checkpoint* raw_out) {
  std::ifstream sidecar(path + ".json");
  if (!sidecar) {
    throw IoError("model load: missing config sidecar '" + path + ".json'");
  }
  nlohmann::json config_json;
  try {
    sidecar >> config_json;
  } catch (const nlohmann::json::exception& e) {
    throw std::runtime_error("model load: malformed sidecar: " + std::string(e.what()));
  }
  ModelConfig config = ModelConfig::from_json(config_json);
  InterFormerModel model(config, 0);

  Checkpoint ckpt = read_checkpoint(path);
  for (auto& [name, tensor] : model.named_parameters()) {
    const CheckpointEntry* entry = ckpt.find(name);
    if (!entry) throw std::runtime_error("model load: checkpoint is missing '" + name + "'");
    if (entry->shape != tensor.shape()) {
      throw std::runtime_error("model load: shape mismatch for '" + name + "'");
    }
    Tensor t = tensor;
    t.mutable_data() = entry->values;
  }
  if (raw_out) *raw_out = std::move(ckpt);
  return model;
}

}  // namespace interformer
