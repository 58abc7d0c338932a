#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <memory>
#include <vector>

namespace interformer {

namespace detail {

struct TensorNode {
  std::vector<std::size_t> shape;
  std::vector<double> data;
  std::vector<double> grad;  // sized lazily, only when requires_grad
  bool requires_grad = false;
  bool backward_ran = false;
  std::uint64_t id = 0;  // creation order; parents always have smaller ids
  std::vector<std::shared_ptr<TensorNode>> parents;
  std::function<void()> backprop;  // pulls this->grad, accumulates into parents

  void ensure_grad();
};

}  // namespace detail

// Dense row-major float64 tensor participating in reverse-mode
// differentiation. Tensor is a shared handle: copies alias the same storage,
// so the parameter handed to the optimizer and the one used in a forward pass
// are one buffer. Every op records its inputs and a backward rule; calling
// backward() on a scalar result accumulates d(result)/d(leaf) into the grad
// buffer of every reachable requires_grad leaf. The recorded graph is
// rebuilt by each forward pass; a given scalar can be differentiated once.
class Tensor {
 public:
  Tensor() = default;

  static Tensor zeros(std::vector<std::size_t> shape, bool requires_grad = false);
  static Tensor from_data(std::vector<std::size_t> shape, std::vector<double> data,
                          bool requires_grad = false);
  static Tensor scalar(double value, bool requires_grad = false);

  bool defined() const { return node_ != nullptr; }
  const std::vector<std::size_t>& shape() const;
  std::size_t numel() const;
  std::size_t ndim() const;
  // 2-d accessors.
  std::size_t rows() const;
  std::size_t cols() const;
  double at(std::size_t r, std::size_t c) const;

  const std::vector<double>& data() const;
  std::vector<double>& mutable_data();
  bool requires_grad() const;
  const std::vector<double>& grad() const;  // throws if no gradient present
  void zero_grad();

  double value() const;  // scalar convenience

  // Reverse-mode sweep from a scalar. Throws on non-scalar tensors, on
  // tensors detached from any differentiable leaf, and on a second call for
  // the same node.
  void backward();

  detail::TensorNode* node() const { return node_.get(); }
  const std::shared_ptr<detail::TensorNode>& shared_node() const { return node_; }

 private:
  friend class OpBuilder;
  std::shared_ptr<detail::TensorNode> node_;
};

// --- differentiable operations ------------------------------------------

Tensor matmul(const Tensor& a, const Tensor& b);
Tensor transpose(const Tensor& a);
// Fused products that skip the explicit transpose node.
Tensor matmul_transpose_a(const Tensor& a, const Tensor& b);  // a^T . b
Tensor matmul_transpose_b(const Tensor& a, const Tensor& b);  // a . b^T

Tensor add(const Tensor& a, const Tensor& b);
Tensor sub(const Tensor& a, const Tensor& b);
Tensor mul(const Tensor& a, const Tensor& b);  // elementwise
Tensor scale(const Tensor& a, double factor);

// Elementwise combination with a constant (non-differentiated) matrix of the
// same shape. Used for attention masks, biases and injected noise.
Tensor add_constant(const Tensor& a, const std::vector<double>& constant);
Tensor mul_constant(const Tensor& a, const std::vector<double>& constant);

Tensor relu(const Tensor& a);
Tensor sigmoid(const Tensor& a);
Tensor tanh(const Tensor& a);

// softmax/log_softmax normalize along `axis`: for a 2-d tensor, axis 1 makes
// every row sum to one, axis 0 every column. 1-d tensors use axis 0.
Tensor softmax(const Tensor& a, int axis);
Tensor log_softmax(const Tensor& a, int axis);

// Normalizes each slice along `axis` to zero mean / unit variance
// (epsilon 1e-5 inside the square root), then applies gain and bias, both of
// length shape[axis]. 2-d only, axis 0.
Tensor layer_norm(const Tensor& x, const Tensor& gain, const Tensor& bias, int axis);

Tensor concat(const std::vector<Tensor>& parts, int axis);
std::vector<Tensor> split(const Tensor& a, int axis, const std::vector<std::size_t>& sizes);
Tensor slice(const Tensor& a, int axis, std::size_t start, std::size_t len);
Tensor reshape(const Tensor& a, std::vector<std::size_t> new_shape);

Tensor sum(const Tensor& a);                      // scalar
Tensor mse_mean(const Tensor& a, const Tensor& b);  // mean squared difference, scalar

}  // namespace interformer
