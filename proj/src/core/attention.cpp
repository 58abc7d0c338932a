#include "core/attention.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace interformer {

namespace {

constexpr double kMaskedLogit = -1e9;

std::vector<double> causal_penalty(std::size_t l_q, std::size_t l_k) {
  std::vector<double> penalty(l_q * l_k, 0.0);
  for (std::size_t i = 0; i < l_q; ++i) {
    for (std::size_t j = i + 1; j < l_k; ++j) penalty[i * l_k + j] = kMaskedLogit;
  }
  return penalty;
}

std::vector<double> mask_penalty(const std::vector<double>& mask) {
  std::vector<double> penalty(mask.size(), 0.0);
  for (std::size_t e = 0; e < mask.size(); ++e) {
    if (mask[e] == 0.0) penalty[e] = kMaskedLogit;
  }
  return penalty;
}

}  // namespace

std::vector<double> softmax_rows(const std::vector<double>& m, std::size_t rows,
                                 std::size_t cols) {
  if (m.size() != rows * cols) throw std::invalid_argument("softmax_rows: size mismatch");
  std::vector<double> out(m.size());
  for (std::size_t i = 0; i < rows; ++i) {
    double mx = m[i * cols];
    for (std::size_t j = 1; j < cols; ++j) mx = std::max(mx, m[i * cols + j]);
    double denom = 0.0;
    for (std::size_t j = 0; j < cols; ++j) {
      out[i * cols + j] = std::exp(m[i * cols + j] - mx);
      denom += out[i * cols + j];
    }
    for (std::size_t j = 0; j < cols; ++j) out[i * cols + j] /= denom;
  }
  return out;
}

AttentionResult scaled_dot_attention(const Tensor& q, const Tensor& k, const Tensor& v,
                                     const AttentionOptions& options) {
  const std::size_t dim = q.rows();
  const std::size_t l_q = q.cols();
  const std::size_t l_k = k.cols();
  if (k.rows() != dim || v.rows() != dim) {
    throw std::invalid_argument("scaled_dot_attention: feature sizes disagree");
  }
  if (v.cols() != l_k) {
    throw std::invalid_argument("scaled_dot_attention: key/value lengths disagree");
  }
  if (options.mask && options.mask->size() != l_q * l_k) {
    throw std::invalid_argument("scaled_dot_attention: mask must be " + std::to_string(l_q) +
                                "x" + std::to_string(l_k));
  }
  if (options.bias && options.bias->size() != l_q * l_k) {
    throw std::invalid_argument("scaled_dot_attention: bias must be " + std::to_string(l_q) +
                                "x" + std::to_string(l_k));
  }

  Tensor logits = scale(matmul_transpose_a(q, k), 1.0 / std::sqrt(static_cast<double>(dim)));
  if (options.causal) logits = add_constant(logits, causal_penalty(l_q, l_k));
  if (options.mask && options.mask_mode == MaskMode::kPreSoftmax) {
    logits = add_constant(logits, mask_penalty(*options.mask));
  }
  Tensor att = softmax(logits, 1);
  if (options.bias) att = add_constant(att, *options.bias);
  if (options.mask && options.mask_mode == MaskMode::kPostSoftmax) {
    att = mul_constant(att, *options.mask);
  }
  AttentionResult result;
  result.attention = att;
  result.output = matmul_transpose_b(v, att);
  return result;
}

ProjectedQkv project_qkv(const Tensor& a, const Tensor& b, const Tensor& c,
                         const AttentionHeadParams& params) {
  const std::size_t dim = a.rows();
  if (params.w_q.rows() != dim || params.w_q.cols() != dim || params.w_k.rows() != dim ||
      params.w_k.cols() != dim || params.w_v.rows() != dim || params.w_v.cols() != dim) {
    throw std::invalid_argument("project_qkv: weights must be square with side " +
                                std::to_string(dim));
  }
  if (b.rows() != dim || c.rows() != dim) {
    throw std::invalid_argument("project_qkv: input feature sizes disagree");
  }
  ProjectedQkv out;
  out.q = matmul_transpose_a(params.w_q, a);
  out.k = matmul_transpose_a(params.w_k, b);
  out.v = matmul_transpose_a(params.w_v, c);
  return out;
}

Tensor multi_head_attention(const Tensor& a, const Tensor& b, const Tensor& c,
                            const std::vector<AttentionHeadParams>& heads,
                            const AttentionOptions& options,
                            std::vector<Tensor>* attention_out) {
  if (heads.empty()) throw std::invalid_argument("multi_head_attention: no heads given");
  const std::size_t dim = a.rows();
  const std::size_t n_heads = heads.size();
  if (dim % n_heads != 0) {
    throw std::invalid_argument("multi_head_attention: feature size " + std::to_string(dim) +
                                " is not divisible by " + std::to_string(n_heads) + " heads");
  }
  const std::size_t width = dim / n_heads;
  std::vector<Tensor> outputs;
  outputs.reserve(n_heads);
  for (std::size_t h = 0; h < n_heads; ++h) {
    Tensor a_h = n_heads == 1 ? a : slice(a, 0, h * width, width);
    Tensor b_h = b.node() == a.node() ? a_h
                                      : (n_heads == 1 ? b : slice(b, 0, h * width, width));
    Tensor c_h = c.node() == a.node()
                     ? a_h
                     : (c.node() == b.node() ? b_h
                                             : (n_heads == 1 ? c : slice(c, 0, h * width, width)));
    ProjectedQkv qkv = project_qkv(a_h, b_h, c_h, heads[h]);
    AttentionResult r = scaled_dot_attention(qkv.q, qkv.k, qkv.v, options);
    if (attention_out) attention_out->push_back(r.attention);
    outputs.push_back(r.output);
  }
  return n_heads == 1 ? outputs[0] : concat(outputs, 0);
}

Tensor spatial_attention(const Tensor& frame_a, const Tensor& frame_b, const Tensor& frame_c,
                         const std::vector<AttentionHeadParams>& heads,
                         const AttentionConfig& config, const AdjacencyMasks* masks,
                         const std::vector<double>* dist,
                         std::vector<Tensor>* attention_out) {
  if (frame_a.ndim() != 2 || frame_a.cols() != 3) {
    throw std::invalid_argument("spatial_attention: frames must be k x 3");
  }
  const std::size_t k = frame_a.rows();
  if (config.use_adjacency_mask && masks == nullptr) {
    throw std::invalid_argument("spatial_attention: adjacency mask requested but none given");
  }
  if (config.use_distance_bias && dist == nullptr) {
    throw std::invalid_argument("spatial_attention: distance bias requested but none given");
  }
  if (masks && masks->joint_count != k) {
    throw std::invalid_argument("spatial_attention: mask joint count mismatch");
  }
  if (dist && dist->size() != k * k) {
    throw std::invalid_argument("spatial_attention: distance matrix must be k x k");
  }

  AttentionOptions options;
  options.causal = config.causal;
  options.mask_mode = config.mask_mode;
  if (config.use_adjacency_mask) options.mask = &masks->mask;
  std::vector<double> bias;
  if (config.use_distance_bias) {
    bias = softmax_rows(*dist, k, k);
    options.bias = &bias;
  }
  Tensor a_t = transpose(frame_a);
  Tensor b_t = frame_b.node() == frame_a.node() ? a_t : transpose(frame_b);
  Tensor c_t = frame_c.node() == frame_a.node()
                   ? a_t
                   : (frame_c.node() == frame_b.node() ? b_t : transpose(frame_c));
  Tensor out = multi_head_attention(a_t, b_t, c_t, heads, options, attention_out);
  return transpose(out);
}

Tensor temporal_attention(const Tensor& seq_a, const Tensor& seq_b, const Tensor& seq_c,
                          const std::vector<AttentionHeadParams>& heads, bool causal) {
  AttentionOptions options;
  options.causal = causal;
  return multi_head_attention(seq_a, seq_b, seq_c, heads, options);
}

Tensor positional_encoding(std::size_t t_len, std::size_t d) {
  if (d % 2 != 0) {
    throw std::invalid_argument("positional_encoding: feature size must be even, got " +
                                std::to_string(d));
  }
  std::vector<double> pe(d * t_len);
  for (std::size_t i = 0; 2 * i < d; ++i) {
    const double rate = std::pow(10000.0, 2.0 * static_cast<double>(i) / static_cast<double>(d));
    for (std::size_t t = 0; t < t_len; ++t) {
      const double angle = static_cast<double>(t) / rate;
      pe[(2 * i) * t_len + t] = std::sin(angle);
      pe[(2 * i + 1) * t_len + t] = std::cos(angle);
    }
  }
  return Tensor::from_data({d, t_len}, std::move(pe));
}

}  // namespace interformer
