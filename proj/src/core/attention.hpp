#pragma once

#include <cstddef>
#include <vector>

#include "core/skeleton.hpp"
#include "core/tensor.hpp"

namespace interformer {

// Query/key/value projection weights for one head; square, sized to the
// head's feature width.
struct AttentionHeadParams {
  Tensor w_q;
  Tensor w_k;
  Tensor w_v;
};

enum class MaskMode {
  kPostSoftmax,  // zero masked attention entries after the softmax
  kPreSoftmax,   // push masked logits to -1e9 before the softmax
};

struct AttentionConfig {
  std::size_t heads = 1;
  bool use_adjacency_mask = false;
  bool use_distance_bias = false;
  bool causal = false;
  MaskMode mask_mode = MaskMode::kPostSoftmax;
};

struct AttentionOptions {
  bool causal = false;
  // Binary L_q x L_k matrix; entries with value 0 are hidden per mask_mode.
  const std::vector<double>* mask = nullptr;
  // L_q x L_k matrix added to the attention weights after the softmax.
  const std::vector<double>* bias = nullptr;
  MaskMode mask_mode = MaskMode::kPostSoftmax;
};

struct AttentionResult {
  Tensor output;     // dim x L_q
  Tensor attention;  // L_q x L_k, after mask/bias
};

// Columns are the attended items: q, k, v are dim x L with one column per
// joint (spatial) or per frame (temporal). The attention weights are
// softmax(q^T k / sqrt(dim)) row-normalized over the keys; `causal` hides
// keys beyond the query index before the softmax.
AttentionResult scaled_dot_attention(const Tensor& q, const Tensor& k, const Tensor& v,
                                     const AttentionOptions& options = {});

struct ProjectedQkv {
  Tensor q;
  Tensor k;
  Tensor v;
};

// q_i = a_i W_q (and likewise for keys and values), with the items laid out
// as columns of a, b, c. Self-attention passes a = b = c.
ProjectedQkv project_qkv(const Tensor& a, const Tensor& b, const Tensor& c,
                         const AttentionHeadParams& params);

// Splits the feature rows contiguously into heads.size() equal slices, runs
// each head on its slice, concatenates the outputs in head order. There is
// no output projection. Optional `attention_out` receives each head's
// attention matrix.
Tensor multi_head_attention(const Tensor& a, const Tensor& b, const Tensor& c,
                            const std::vector<AttentionHeadParams>& heads,
                            const AttentionOptions& options = {},
                            std::vector<Tensor>* attention_out = nullptr);

// Attention across the k joints of a single frame. Inputs and output are
// k x 3 (row per joint). The adjacency mask hides non-adjacent joint pairs;
// `dist` (k x k, larger = closer) is softmaxed row-wise and added to the
// attention weights.
Tensor spatial_attention(const Tensor& frame_a, const Tensor& frame_b, const Tensor& frame_c,
                         const std::vector<AttentionHeadParams>& heads,
                         const AttentionConfig& config, const AdjacencyMasks* masks = nullptr,
                         const std::vector<double>* dist = nullptr,
                         std::vector<Tensor>* attention_out = nullptr);

// Attention across frames; inputs and output are d x T (column per frame).
Tensor temporal_attention(const Tensor& seq_a, const Tensor& seq_b, const Tensor& seq_c,
                          const std::vector<AttentionHeadParams>& heads, bool causal);

// Sinusoidal position table, d x T with PE[2i][t] = sin(t / 10000^(2i/d))
// and PE[2i+1][t] = cos(t / 10000^(2i/d)). Requires even d.
Tensor positional_encoding(std::size_t t_len, std::size_t d);

// Row-wise softmax over a plain row-major matrix; used to turn the
// interaction distance matrix into an attention bias.
std::vector<double> softmax_rows(const std::vector<double>& m, std::size_t rows,
                                 std::size_t cols);

}  // namespace interformer
