#include "core/tensor.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <sstream>
#include <stdexcept>
#include <unordered_set>

namespace interformer {

using detail::TensorNode;

namespace {

std::atomic<std::uint64_t> g_next_id{1};

std::string shape_str(const std::vector<std::size_t>& s) {
  std::ostringstream os;
  os << "[";
  for (std::size_t i = 0; i < s.size(); ++i) os << (i ? "x" : "") << s[i];
  os << "]";
  return os.str();
}

std::size_t numel_of(const std::vector<std::size_t>& s) {
  std::size_t n = 1;
  for (auto d : s) n *= d;
  return n;
}

void require(bool cond, const std::string& msg) {
  if (!cond) throw std::invalid_argument(msg);
}

void require_same_shape(const Tensor& a, const Tensor& b, const char* op) {
  require(a.shape() == b.shape(), std::string(op) + ": shape mismatch " +
                                      shape_str(a.shape()) + " vs " + shape_str(b.shape()));
}

}  // namespace

void TensorNode::ensure_grad() {
  if (grad.size() != data.size()) grad.assign(data.size(), 0.0);
}

// Internal factory with access to Tensor::node_.
class OpBuilder {
 public:
  static Tensor wrap(std::shared_ptr<TensorNode> node) {
    Tensor t;
    t.node_ = std::move(node);
    return t;
  }

  static std::shared_ptr<TensorNode> leaf(std::vector<std::size_t> shape,
                                          std::vector<double> data, bool requires_grad) {
    auto n = std::make_shared<TensorNode>();
    n->shape = std::move(shape);
    n->data = std::move(data);
    n->requires_grad = requires_grad;
    n->id = g_next_id.fetch_add(1, std::memory_order_relaxed);
    return n;
  }

  // Result node whose backward rule is installed by the caller afterwards.
  static std::shared_ptr<TensorNode> result(std::vector<std::size_t> shape,
                                            std::vector<double> data,
                                            std::initializer_list<Tensor> inputs) {
    auto n = leaf(std::move(shape), std::move(data), false);
    for (const auto& in : inputs) {
      if (in.node()->requires_grad) n->requires_grad = true;
    }
    if (n->requires_grad) {
      for (const auto& in : inputs) n->parents.push_back(in.shared_node());
    }
    return n;
  }

};

// --- Tensor ---------------------------------------------------------------

Tensor Tensor::zeros(std::vector<std::size_t> shape, bool requires_grad) {
  const std::size_t n = numel_of(shape);
  require(n > 0, "zeros: shape with zero extent " + shape_str(shape));
  return OpBuilder::wrap(OpBuilder::leaf(std::move(shape), std::vector<double>(n, 0.0), requires_grad));
}

Tensor Tensor::from_data(std::vector<std::size_t> shape, std::vector<double> data,
                         bool requires_grad) {
  require(numel_of(shape) == data.size(),
          "from_data: data length " + std::to_string(data.size()) + " does not match shape " +
              shape_str(shape));
  return OpBuilder::wrap(OpBuilder::leaf(std::move(shape), std::move(data), requires_grad));
}

Tensor Tensor::scalar(double value, bool requires_grad) {
  return from_data({1}, {value}, requires_grad);
}

const std::vector<std::size_t>& Tensor::shape() const { return node_->shape; }
std::size_t Tensor::numel() const { return node_->data.size(); }
std::size_t Tensor::ndim() const { return node_->shape.size(); }

std::size_t Tensor::rows() const {
  require(ndim() == 2, "rows: tensor is not 2-d");
  return node_->shape[0];
}

std::size_t Tensor::cols() const {
  require(ndim() == 2, "cols: tensor is not 2-d");
  return node_->shape[1];
}

double Tensor::at(std::size_t r, std::size_t c) const { return node_->data[r * cols() + c]; }

const std::vector<double>& Tensor::data() const { return node_->data; }
std::vector<double>& Tensor::mutable_data() { return node_->data; }
bool Tensor::requires_grad() const { return node_->requires_grad; }

const std::vector<double>& Tensor::grad() const {
  require(node_->requires_grad, "grad: tensor does not require gradients");
  require(node_->grad.size() == node_->data.size(), "grad: no gradient accumulated yet");
  return node_->grad;
}

void Tensor::zero_grad() {
  if (node_->requires_grad) node_->grad.assign(node_->data.size(), 0.0);
}

double Tensor::value() const {
  require(numel() == 1, "value: tensor is not a scalar");
  return node_->data[0];
}

void Tensor::backward() {
  require(defined(), "backward: empty tensor");
  require(numel() == 1, "backward: loss must be a scalar, got shape " + shape_str(shape()));
  require(node_->requires_grad,
          "backward: loss is detached from every differentiable leaf");
  if (node_->backward_ran) {
    throw std::runtime_error(
        "backward: already ran for this result; rebuild the graph before differentiating again");
  }
  node_->backward_ran = true;

  // Creation ids give a topological order: an op's inputs always predate it.
  std::vector<TensorNode*> order;
  std::unordered_set<TensorNode*> seen;
  std::vector<TensorNode*> stack{node_.get()};
  seen.insert(node_.get());
  while (!stack.empty()) {
    TensorNode* n = stack.back();
    stack.pop_back();
    order.push_back(n);
    for (const auto& p : n->parents) {
      if (p->requires_grad && seen.insert(p.get()).second) stack.push_back(p.get());
    }
  }
  std::sort(order.begin(), order.end(),
            [](const TensorNode* a, const TensorNode* b) { return a->id > b->id; });

  node_->ensure_grad();
  node_->grad[0] += 1.0;
  for (TensorNode* n : order) {
    if (n->backprop) n->backprop();
  }
}

// --- ops -------------------------------------------------------------------

Tensor matmul(const Tensor& a, const Tensor& b) {
  require(a.ndim() == 2 && b.ndim() == 2, "matmul: both operands must be 2-d");
  require(a.cols() == b.rows(), "matmul: inner dimensions disagree, " + shape_str(a.shape()) +
                                    " vs " + shape_str(b.shape()));
  const std::size_t m = a.rows(), n = a.cols(), p = b.cols();
  std::vector<double> out(m * p, 0.0);
  const auto& ad = a.data();
  const auto& bd = b.data();
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t k = 0; k < n; ++k) {
      const double aik = ad[i * n + k];
      if (aik == 0.0) continue;
      const double* brow = &bd[k * p];
      double* orow = &out[i * p];
      for (std::size_t j = 0; j < p; ++j) orow[j] += aik * brow[j];
    }
  }
  auto node = OpBuilder::result({m, p}, std::move(out), {a, b});
  if (node->requires_grad) {
    TensorNode* self = node.get();
    TensorNode* pa = a.node();
    TensorNode* pb = b.node();
    node->backprop = [self, pa, pb, m, n, p]() {
      const auto& g = self->grad;
      if (pa->requires_grad) {
        pa->ensure_grad();
        // da += g . b^T
        for (std::size_t i = 0; i < m; ++i)
          for (std::size_t k = 0; k < n; ++k) {
            double acc = 0.0;
            for (std::size_t j = 0; j < p; ++j) acc += g[i * p + j] * pb->data[k * p + j];
            pa->grad[i * n + k] += acc;
          }
      }
      if (pb->requires_grad) {
        pb->ensure_grad();
        // db += a^T . g
        for (std::size_t k = 0; k < n; ++k)
          for (std::size_t i = 0; i < m; ++i) {
            const double aik = pa->data[i * n + k];
            if (aik == 0.0) continue;
            for (std::size_t j = 0; j < p; ++j) pb->grad[k * p + j] += aik * g[i * p + j];
          }
      }
    };
  }
  return OpBuilder::wrap(node);
}

Tensor matmul_transpose_a(const Tensor& a, const Tensor& b) {
  require(a.ndim() == 2 && b.ndim() == 2, "matmul_transpose_a: both operands must be 2-d");
  require(a.rows() == b.rows(), "matmul_transpose_a: leading dimensions disagree, " +
                                    shape_str(a.shape()) + " vs " + shape_str(b.shape()));
  const std::size_t m = a.rows(), n = a.cols(), p = b.cols();
  std::vector<double> out(n * p, 0.0);
  const auto& ad = a.data();
  const auto& bd = b.data();
  for (std::size_t k = 0; k < m; ++k) {
    const double* arow = &ad[k * n];
    const double* brow = &bd[k * p];
    for (std::size_t i = 0; i < n; ++i) {
      const double aki = arow[i];
      if (aki == 0.0) continue;
      double* orow = &out[i * p];
      for (std::size_t j = 0; j < p; ++j) orow[j] += aki * brow[j];
    }
  }
  auto node = OpBuilder::result({n, p}, std::move(out), {a, b});
  if (node->requires_grad) {
    TensorNode* self = node.get();
    TensorNode* pa = a.node();
    TensorNode* pb = b.node();
    node->backprop = [self, pa, pb, m, n, p]() {
      const auto& g = self->grad;
      if (pa->requires_grad) {
        pa->ensure_grad();
        // da += b . g^T
        for (std::size_t k = 0; k < m; ++k)
          for (std::size_t i = 0; i < n; ++i) {
            double acc = 0.0;
            for (std::size_t j = 0; j < p; ++j) acc += pb->data[k * p + j] * g[i * p + j];
            pa->grad[k * n + i] += acc;
          }
      }
      if (pb->requires_grad) {
        pb->ensure_grad();
        // db += a . g
        for (std::size_t k = 0; k < m; ++k)
          for (std::size_t i = 0; i < n; ++i) {
            const double aki = pa->data[k * n + i];
            if (aki == 0.0) continue;
            for (std::size_t j = 0; j < p; ++j) pb->grad[k * p + j] += aki * g[i * p + j];
          }
      }
    };
  }
  return OpBuilder::wrap(node);
}

Tensor matmul_transpose_b(const Tensor& a, const Tensor& b) {
  require(a.ndim() == 2 && b.ndim() == 2, "matmul_transpose_b: both operands must be 2-d");
  require(a.cols() == b.cols(), "matmul_transpose_b: trailing dimensions disagree, " +
                                    shape_str(a.shape()) + " vs " + shape_str(b.shape()));
  const std::size_t m = a.rows(), n = a.cols(), p = b.rows();
  std::vector<double> out(m * p, 0.0);
  const auto& ad = a.data();
  const auto& bd = b.data();
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < p; ++j) {
      double acc = 0.0;
      for (std::size_t k = 0; k < n; ++k) acc += ad[i * n + k] * bd[j * n + k];
      out[i * p + j] = acc;
    }
  }
  auto node = OpBuilder::result({m, p}, std::move(out), {a, b});
  if (node->requires_grad) {
    TensorNode* self = node.get();
    TensorNode* pa = a.node();
    TensorNode* pb = b.node();
    node->backprop = [self, pa, pb, m, n, p]() {
      const auto& g = self->grad;
      if (pa->requires_grad) {
        pa->ensure_grad();
        // da += g . b
        for (std::size_t i = 0; i < m; ++i)
          for (std::size_t j = 0; j < p; ++j) {
            const double gij = g[i * p + j];
            if (gij == 0.0) continue;
            for (std::size_t k = 0; k < n; ++k) pa->grad[i * n + k] += gij * pb->data[j * n + k];
          }
      }
      if (pb->requires_grad) {
        pb->ensure_grad();
        // db += g^T . a
        for (std::size_t i = 0; i < m; ++i)
          for (std::size_t j = 0; j < p; ++j) {
            const double gij = g[i * p + j];
            if (gij == 0.0) continue;
            for (std::size_t k = 0; k < n; ++k) pb->grad[j * n + k] += gij * pa->data[i * n + k];
          }
      }
    };
  }
  return OpBuilder::wrap(node);
}

Tensor transpose(const Tensor& a) {
  require(a.ndim() == 2, "transpose: tensor must be 2-d");
  const std::size_t r = a.rows(), c = a.cols();
  std::vector<double> out(r * c);
  const auto& ad = a.data();
  for (std::size_t i = 0; i < r; ++i)
    for (std::size_t j = 0; j < c; ++j) out[j * r + i] = ad[i * c + j];
  auto node = OpBuilder::result({c, r}, std::move(out), {a});
  if (node->requires_grad) {
    TensorNode* self = node.get();
    TensorNode* pa = a.node();
    node->backprop = [self, pa, r, c]() {
      pa->ensure_grad();
      for (std::size_t i = 0; i < r; ++i)
        for (std::size_t j = 0; j < c; ++j) pa->grad[i * c + j] += self->grad[j * r + i];
    };
  }
  return OpBuilder::wrap(node);
}

namespace {

template <typename Fwd, typename Bwd>
Tensor binary_elementwise(const Tensor& a, const Tensor& b, const char* name, Fwd fwd, Bwd bwd) {
  require_same_shape(a, b, name);
  const std::size_t n = a.numel();
  std::vector<double> out(n);
  for (std::size_t i = 0; i < n; ++i) out[i] = fwd(a.data()[i], b.data()[i]);
  auto node = OpBuilder::result(a.shape(), std::move(out), {a, b});
  if (node->requires_grad) {
    TensorNode* self = node.get();
    TensorNode* pa = a.node();
    TensorNode* pb = b.node();
    node->backprop = [self, pa, pb, n, bwd]() {
      for (std::size_t i = 0; i < n; ++i) {
        double da = 0.0, db = 0.0;
        bwd(self->grad[i], pa->data[i], pb->data[i], da, db);
        if (pa->requires_grad) {
          pa->ensure_grad();
          pa->grad[i] += da;
        }
        if (pb->requires_grad) {
          pb->ensure_grad();
          pb->grad[i] += db;
        }
      }
    };
  }
  return OpBuilder::wrap(node);
}

template <typename Fwd, typename Bwd>
Tensor unary_elementwise(const Tensor& a, Fwd fwd, Bwd bwd) {
  const std::size_t n = a.numel();
  std::vector<double> out(n);
  for (std::size_t i = 0; i < n; ++i) out[i] = fwd(a.data()[i]);
  auto node = OpBuilder::result(a.shape(), std::move(out), {a});
  if (node->requires_grad) {
    TensorNode* self = node.get();
    TensorNode* pa = a.node();
    node->backprop = [self, pa, n, bwd]() {
      pa->ensure_grad();
      for (std::size_t i = 0; i < n; ++i)
        pa->grad[i] += bwd(self->grad[i], pa->data[i], self->data[i]);
    };
  }
  return OpBuilder::wrap(node);
}

}  // namespace

Tensor add(const Tensor& a, const Tensor& b) {
  return binary_elementwise(
      a, b, "add", [](double x, double y) { return x + y; },
      [](double g, double, double, double& da, double& db) {
        da = g;
        db = g;
      });
}

Tensor sub(const Tensor& a, const Tensor& b) {
  return binary_elementwise(
      a, b, "sub", [](double x, double y) { return x - y; },
      [](double g, double, double, double& da, double& db) {
        da = g;
        db = -g;
      });
}

Tensor mul(const Tensor& a, const Tensor& b) {
  return binary_elementwise(
      a, b, "mul", [](double x, double y) { return x * y; },
      [](double g, double x, double y, double& da, double& db) {
        da = g * y;
        db = g * x;
      });
}

Tensor scale(const Tensor& a, double factor) {
  return unary_elementwise(
      a, [factor](double x) { return factor * x; },
      [factor](double g, double, double) { return factor * g; });
}

Tensor add_constant(const Tensor& a, const std::vector<double>& constant) {
  require(constant.size() == a.numel(), "add_constant: constant length mismatch");
  const std::size_t n = a.numel();
  std::vector<double> out(n);
  for (std::size_t i = 0; i < n; ++i) out[i] = a.data()[i] + constant[i];
  auto node = OpBuilder::result(a.shape(), std::move(out), {a});
  if (node->requires_grad) {
    TensorNode* self = node.get();
    TensorNode* pa = a.node();
    node->backprop = [self, pa, n]() {
      pa->ensure_grad();
      for (std::size_t i = 0; i < n; ++i) pa->grad[i] += self->grad[i];
    };
  }
  return OpBuilder::wrap(node);
}

Tensor mul_constant(const Tensor& a, const std::vector<double>& constant) {
  require(constant.size() == a.numel(), "mul_constant: constant length mismatch");
  const std::size_t n = a.numel();
  std::vector<double> out(n);
  for (std::size_t i = 0; i < n; ++i) out[i] = a.data()[i] * constant[i];
  auto node = OpBuilder::result(a.shape(), std::move(out), {a});
  if (node->requires_grad) {
    TensorNode* self = node.get();
    TensorNode* pa = a.node();
    std::vector<double> c = constant;
    node->backprop = [self, pa, n, c = std::move(c)]() {
      pa->ensure_grad();
      for (std::size_t i = 0; i < n; ++i) pa->grad[i] += self->grad[i] * c[i];
    };
  }
  return OpBuilder::wrap(node);
}

Tensor relu(const Tensor& a) {
  return unary_elementwise(
      a, [](double x) { return x > 0.0 ? x : 0.0; },
      [](double g, double x, double) { return x > 0.0 ? g : 0.0; });
}

Tensor sigmoid(const Tensor& a) {
  return unary_elementwise(
      a, [](double x) { return 1.0 / (1.0 + std::exp(-x)); },
      [](double g, double, double y) { return g * y * (1.0 - y); });
}

Tensor tanh(const Tensor& a) {
  return unary_elementwise(
      a, [](double x) { return std::tanh(x); },
      [](double g, double, double y) { return g * (1.0 - y * y); });
}

namespace {

// Iterates the slices of a 1-d/2-d tensor along `axis`. Calls fn(base, stride, len)
// for each slice.
template <typename Fn>
void for_each_slice(const std::vector<std::size_t>& shape, int axis, Fn fn) {
  require(!shape.empty() && shape.size() <= 2, "softmax/log_softmax: tensor must be 1-d or 2-d");
  if (shape.size() == 1) {
    require(axis == 0, "axis out of range for 1-d tensor");
    fn(std::size_t{0}, std::size_t{1}, shape[0]);
    return;
  }
  const std::size_t r = shape[0], c = shape[1];
  require(axis == 0 || axis == 1, "axis out of range for 2-d tensor");
  if (axis == 1) {
    for (std::size_t i = 0; i < r; ++i) fn(i * c, std::size_t{1}, c);
  } else {
    for (std::size_t j = 0; j < c; ++j) fn(j, c, r);
  }
}

}  // namespace

Tensor softmax(const Tensor& a, int axis) {
  std::vector<double> out(a.numel());
  const auto& x = a.data();
  for_each_slice(a.shape(), axis, [&](std::size_t base, std::size_t stride, std::size_t len) {
    double mx = x[base];
    for (std::size_t i = 1; i < len; ++i) mx = std::max(mx, x[base + i * stride]);
    double denom = 0.0;
    for (std::size_t i = 0; i < len; ++i) {
      const double e = std::exp(x[base + i * stride] - mx);
      out[base + i * stride] = e;
      denom += e;
    }
    for (std::size_t i = 0; i < len; ++i) out[base + i * stride] /= denom;
  });
  auto node = OpBuilder::result(a.shape(), std::move(out), {a});
  if (node->requires_grad) {
    TensorNode* self = node.get();
    TensorNode* pa = a.node();
    auto shape = a.shape();
    node->backprop = [self, pa, shape, axis]() {
      pa->ensure_grad();
      const auto& y = self->data;
      const auto& g = self->grad;
      for_each_slice(shape, axis, [&](std::size_t base, std::size_t stride, std::size_t len) {
        double dot = 0.0;
        for (std::size_t i = 0; i < len; ++i) dot += g[base + i * stride] * y[base + i * stride];
        for (std::size_t i = 0; i < len; ++i) {
          const std::size_t k = base + i * stride;
          pa->grad[k] += y[k] * (g[k] - dot);
        }
      });
    };
  }
  return OpBuilder::wrap(node);
}

Tensor log_softmax(const Tensor& a, int axis) {
  std::vector<double> out(a.numel());
  const auto& x = a.data();
  for_each_slice(a.shape(), axis, [&](std::size_t base, std::size_t stride, std::size_t len) {
    double mx = x[base];
    for (std::size_t i = 1; i < len; ++i) mx = std::max(mx, x[base + i * stride]);
    double denom = 0.0;
    for (std::size_t i = 0; i < len; ++i) denom += std::exp(x[base + i * stride] - mx);
    const double lse = mx + std::log(denom);
    for (std::size_t i = 0; i < len; ++i) out[base + i * stride] = x[base + i * stride] - lse;
  });
  auto node = OpBuilder::result(a.shape(), std::move(out), {a});
  if (node->requires_grad) {
    TensorNode* self = node.get();
    TensorNode* pa = a.node();
    auto shape = a.shape();
    node->backprop = [self, pa, shape, axis]() {
      pa->ensure_grad();
      const auto& y = self->data;
      const auto& g = self->grad;
      for_each_slice(shape, axis, [&](std::size_t base, std::size_t stride, std::size_t len) {
        double gsum = 0.0;
        for (std::size_t i = 0; i < len; ++i) gsum += g[base + i * stride];
        for (std::size_t i = 0; i < len; ++i) {
          const std::size_t k = base + i * stride;
          pa->grad[k] += g[k] - std::exp(y[k]) * gsum;
        }
      });
    };
  }
  return OpBuilder::wrap(node);
}

Tensor layer_norm(const Tensor& x, const Tensor& gain, const Tensor& bias, int axis) {
  constexpr double kEps = 1e-5;
  require(x.ndim() == 2, "layer_norm: tensor must be 2-d");
  require(axis == 0, "layer_norm: only axis 0 is supported");
  const std::size_t d = x.rows(), t = x.cols();
  require(gain.numel() == d && bias.numel() == d,
          "layer_norm: gain/bias must have length " + std::to_string(d));
  std::vector<double> xhat(d * t);
  std::vector<double> inv_sd(t);
  const auto& xd = x.data();
  std::vector<double> out(d * t);
  for (std::size_t j = 0; j < t; ++j) {
    double mean = 0.0;
    for (std::size_t i = 0; i < d; ++i) mean += xd[i * t + j];
    mean /= static_cast<double>(d);
    double var = 0.0;
    for (std::size_t i = 0; i < d; ++i) {
      const double c = xd[i * t + j] - mean;
      var += c * c;
    }
    var /= static_cast<double>(d);
    const double s = 1.0 / std::sqrt(var + kEps);
    inv_sd[j] = s;
    for (std::size_t i = 0; i < d; ++i) {
      const double h = (xd[i * t + j] - mean) * s;
      xhat[i * t + j] = h;
      out[i * t + j] = gain.data()[i] * h + bias.data()[i];
    }
  }
  auto node = OpBuilder::result(x.shape(), std::move(out), {x, gain, bias});
  if (node->requires_grad) {
    TensorNode* self = node.get();
    TensorNode* px = x.node();
    TensorNode* pg = gain.node();
    TensorNode* pb = bias.node();
    node->backprop = [self, px, pg, pb, d, t, xhat = std::move(xhat),
                      inv_sd = std::move(inv_sd)]() {
      const auto& g = self->grad;
      if (pg->requires_grad) {
        pg->ensure_grad();
        for (std::size_t i = 0; i < d; ++i) {
          double acc = 0.0;
          for (std::size_t j = 0; j < t; ++j) acc += g[i * t + j] * xhat[i * t + j];
          pg->grad[i] += acc;
        }
      }
      if (pb->requires_grad) {
        pb->ensure_grad();
        for (std::size_t i = 0; i < d; ++i) {
          double acc = 0.0;
          for (std::size_t j = 0; j < t; ++j) acc += g[i * t + j];
          pb->grad[i] += acc;
        }
      }
      if (px->requires_grad) {
        px->ensure_grad();
        for (std::size_t j = 0; j < t; ++j) {
          double mean_u = 0.0, mean_ux = 0.0;
          for (std::size_t i = 0; i < d; ++i) {
            const double u = pg->data[i] * g[i * t + j];
            mean_u += u;
            mean_ux += u * xhat[i * t + j];
          }
          mean_u /= static_cast<double>(d);
          mean_ux /= static_cast<double>(d);
          for (std::size_t i = 0; i < d; ++i) {
            const double u = pg->data[i] * g[i * t + j];
            px->grad[i * t + j] += (u - mean_u - xhat[i * t + j] * mean_ux) * inv_sd[j];
          }
        }
      }
    };
  }
  return OpBuilder::wrap(node);
}

Tensor slice(const Tensor& a, int axis, std::size_t start, std::size_t len) {
  require(a.ndim() == 2, "slice: tensor must be 2-d");
  require(axis == 0 || axis == 1, "slice: axis out of range");
  const std::size_t r = a.rows(), c = a.cols();
  const std::size_t extent = (axis == 0) ? r : c;
  require(start + len <= extent && len > 0, "slice: range out of bounds");
  std::vector<std::size_t> shape = (axis == 0) ? std::vector<std::size_t>{len, c}
                                               : std::vector<std::size_t>{r, len};
  std::vector<double> out(len * (axis == 0 ? c : r));
  const auto& ad = a.data();
  if (axis == 0) {
    std::copy(ad.begin() + start * c, ad.begin() + (start + len) * c, out.begin());
  } else {
    for (std::size_t i = 0; i < r; ++i)
      for (std::size_t j = 0; j < len; ++j) out[i * len + j] = ad[i * c + start + j];
  }
  auto node = OpBuilder::result(std::move(shape), std::move(out), {a});
  if (node->requires_grad) {
    TensorNode* self = node.get();
    TensorNode* pa = a.node();
    node->backprop = [self, pa, axis, start, len, r, c]() {
      pa->ensure_grad();
      if (axis == 0) {
        for (std::size_t i = 0; i < len * c; ++i) pa->grad[start * c + i] += self->grad[i];
      } else {
        for (std::size_t i = 0; i < r; ++i)
          for (std::size_t j = 0; j < len; ++j)
            pa->grad[i * c + start + j] += self->grad[i * len + j];
      }
    };
  }
  return OpBuilder::wrap(node);
}

std::vector<Tensor> split(const Tensor& a, int axis, const std::vector<std::size_t>& sizes) {
  require(a.ndim() == 2, "split: tensor must be 2-d");
  std::size_t total = 0;
  for (auto s : sizes) total += s;
  const std::size_t extent = (axis == 0) ? a.rows() : a.cols();
  require(total == extent, "split: sizes sum to " + std::to_string(total) + ", expected " +
                               std::to_string(extent));
  std::vector<Tensor> parts;
  parts.reserve(sizes.size());
  std::size_t offset = 0;
  for (auto s : sizes) {
    parts.push_back(slice(a, axis, offset, s));
    offset += s;
  }
  return parts;
}

Tensor concat(const std::vector<Tensor>& parts, int axis) {
  require(!parts.empty(), "concat: no tensors given");
  require(axis == 0 || axis == 1, "concat: axis out of range");
  const std::size_t other = (axis == 0) ? parts[0].cols() : parts[0].rows();
  std::size_t extent = 0;
  for (const auto& p : parts) {
    require(p.ndim() == 2, "concat: tensors must be 2-d");
    const std::size_t po = (axis == 0) ? p.cols() : p.rows();
    require(po == other, "concat: mismatched off-axis extents");
    extent += (axis == 0) ? p.rows() : p.cols();
  }
  std::vector<std::size_t> shape = (axis == 0) ? std::vector<std::size_t>{extent, other}
                                               : std::vector<std::size_t>{other, extent};
  std::vector<double> out(extent * other);
  std::size_t offset = 0;
  for (const auto& p : parts) {
    const std::size_t pr = p.rows(), pc = p.cols();
    if (axis == 0) {
      std::copy(p.data().begin(), p.data().end(), out.begin() + offset * other);
      offset += pr;
    } else {
      for (std::size_t i = 0; i < pr; ++i)
        for (std::size_t j = 0; j < pc; ++j) out[i * extent + offset + j] = p.data()[i * pc + j];
      offset += pc;
    }
  }

  auto node = std::make_shared<TensorNode>();
  node->shape = std::move(shape);
  node->data = std::move(out);
  node->id = g_next_id.fetch_add(1, std::memory_order_relaxed);
  for (const auto& p : parts) {
    if (p.requires_grad()) node->requires_grad = true;
  }
  if (node->requires_grad) {
    std::vector<TensorNode*> raw;
    std::vector<std::pair<std::size_t, std::size_t>> dims;  // rows, cols per part
    for (const auto& p : parts) {
      node->parents.push_back(p.shared_node());
      raw.push_back(p.node());
      dims.emplace_back(p.rows(), p.cols());
    }
    TensorNode* self = node.get();
    node->backprop = [self, raw = std::move(raw), dims = std::move(dims), axis, extent, other]() {
      std::size_t offset = 0;
      for (std::size_t pi = 0; pi < raw.size(); ++pi) {
        TensorNode* p = raw[pi];
        const auto [pr, pc] = dims[pi];
        if (p->requires_grad) {
          p->ensure_grad();
          if (axis == 0) {
            for (std::size_t i = 0; i < pr * pc; ++i)
              p->grad[i] += self->grad[offset * other + i];
          } else {
            for (std::size_t i = 0; i < pr; ++i)
              for (std::size_t j = 0; j < pc; ++j)
                p->grad[i * pc + j] += self->grad[i * extent + offset + j];
          }
        }
        offset += (axis == 0) ? pr : pc;
      }
    };
  }
  return OpBuilder::wrap(node);
}

Tensor reshape(const Tensor& a, std::vector<std::size_t> new_shape) {
  require(numel_of(new_shape) == a.numel(),
          "reshape: element count mismatch, " + shape_str(a.shape()) + " to " +
              shape_str(new_shape));
  auto node = OpBuilder::result(std::move(new_shape), a.data(), {a});
  if (node->requires_grad) {
    TensorNode* self = node.get();
    TensorNode* pa = a.node();
    node->backprop = [self, pa]() {
      pa->ensure_grad();
      for (std::size_t i = 0; i < self->grad.size(); ++i) pa->grad[i] += self->grad[i];
    };
  }
  return OpBuilder::wrap(node);
}

Tensor sum(const Tensor& a) {
  double acc = 0.0;
  for (double v : a.data()) acc += v;
  auto node = OpBuilder::result({1}, {acc}, {a});
  if (node->requires_grad) {
    TensorNode* self = node.get();
    TensorNode* pa = a.node();
    node->backprop = [self, pa]() {
      pa->ensure_grad();
      const double g = self->grad[0];
      for (auto& v : pa->grad) v += g;
    };
  }
  return OpBuilder::wrap(node);
}

Tensor mse_mean(const Tensor& a, const Tensor& b) {
  require_same_shape(a, b, "mse_mean");
  Tensor diff = sub(a, b);
  return scale(sum(mul(diff, diff)), 1.0 / static_cast<double>(a.numel()));
}

}  // namespace interformer
