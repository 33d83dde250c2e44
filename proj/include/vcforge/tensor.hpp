/**
 * Copyright 2026 The VCForge Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 * http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */
#pragma once

// Minimal reverse-mode autodiff over dense float32 tensors.
//
// A Tensor is a shared handle to a graph node. Forward ops record their
// inputs and a backprop closure on the result node whenever some input
// requires gradients; backward() then runs the closures in reverse
// topological order. Everything is single-threaded and allocation order is
// fixed, so results are bit-reproducible.
//
// Broadcasting is deliberately limited to tensor-vs-scalar; binary ops
// otherwise demand exactly matching shapes.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <memory>
#include <sstream>
#include <string>
#include <unordered_set>
#include <vector>

#include "vcforge/errors.hpp"
#include "vcforge/gemm.hpp"
#include "vcforge/rng.hpp"

namespace vcforge::nn {

using Shape = std::vector<int>;

inline int64_t shape_numel(const Shape& s) {
  int64_t n = 1;
  for (int d : s) n *= d;
  return n;
}

inline std::string shape_str(const Shape& s) {
  std::ostringstream os;
  os << "[";
  for (size_t i = 0; i < s.size(); ++i) os << (i ? "," : "") << s[i];
  os << "]";
  return os.str();
}

namespace detail {

using vcforge::detail::gemm_nn;
using vcforge::detail::gemm_nt;
using vcforge::detail::gemm_tn;

struct Node {
  Shape shape;
  std::vector<float> data;
  std::vector<float> grad;  // allocated lazily on first accumulation
  bool requires_grad = false;
  std::vector<std::shared_ptr<Node>> parents;
  std::function<void(Node&)> backprop;  // empty on leaves

  std::vector<float>& grad_buf() {
    if (grad.empty()) grad.assign(data.size(), 0.0f);
    return grad;
  }
};

using NodePtr = std::shared_ptr<Node>;

}  // namespace detail

class Tensor {
 public:
  Tensor() = default;

  static Tensor zeros(Shape shape, bool requires_grad = false) {
    return filled(std::move(shape), 0.0f, requires_grad);
  }

  static Tensor filled(Shape shape, float value, bool requires_grad = false) {
    auto n = std::make_shared<detail::Node>();
    n->data.assign(static_cast<size_t>(shape_numel(shape)), value);
    n->shape = std::move(shape);
    n->requires_grad = requires_grad;
    return Tensor(std::move(n));
  }

  static Tensor from_data(Shape shape, std::vector<float> data, bool requires_grad = false) {
    require(static_cast<size_t>(shape_numel(shape)) == data.size(),
            "tensor shape " + shape_str(shape) + " does not match data length " +
                std::to_string(data.size()));
    auto n = std::make_shared<detail::Node>();
    n->shape = std::move(shape);
    n->data = std::move(data);
    n->requires_grad = requires_grad;
    return Tensor(std::move(n));
  }

  static Tensor scalar(float value, bool requires_grad = false) {
    return from_data({1}, {value}, requires_grad);
  }

  /// Uniform init in [-bound, bound], consumed from `rng` in index order.
  static Tensor uniform(Shape shape, float bound, SplitMix64& rng, bool requires_grad = true) {
    auto t = zeros(std::move(shape), requires_grad);
    for (auto& v : t.data()) v = rng.uniform_float(-bound, bound);
    return t;
  }

  bool defined() const { return node_ != nullptr; }
  const Shape& shape() const { return node_->shape; }
  int64_t numel() const { return static_cast<int64_t>(node_->data.size()); }
  bool requires_grad() const { return node_->requires_grad; }

  std::vector<float>& data() { return node_->data; }
  const std::vector<float>& data() const { return node_->data; }

  /// Gradient view; reads as zeros when no backward pass has touched it.
  const std::vector<float>& grad() const { return node_->grad_buf(); }
  bool has_grad() const { return !node_->grad.empty(); }

  void zero_grad() {
    if (!node_->grad.empty()) std::fill(node_->grad.begin(), node_->grad.end(), 0.0f);
  }

  float item() const {
    require(numel() == 1, "item() on non-scalar tensor " + shape_str(shape()));
    return node_->data[0];
  }

  /// Copies values into a fresh leaf outside the graph.
  Tensor detach() const {
    auto n = std::make_shared<detail::Node>();
    n->shape = node_->shape;
    n->data = node_->data;
    n->requires_grad = false;
    return Tensor(std::move(n));
  }

  detail::NodePtr node() const { return node_; }

  explicit Tensor(detail::NodePtr node) : node_(std::move(node)) {}

 private:
  detail::NodePtr node_;
};

namespace detail {

inline Tensor make_result(Shape shape, std::vector<float> data, std::vector<NodePtr> parents,
                          std::function<void(Node&)> backprop) {
  auto n = std::make_shared<Node>();
  n->shape = std::move(shape);
  n->data = std::move(data);
  bool needs = false;
  for (const auto& p : parents)
    if (p->requires_grad) needs = true;
  n->requires_grad = needs;
  if (needs) {
    n->parents = std::move(parents);
    n->backprop = std::move(backprop);
  }
  return Tensor(std::move(n));
}

inline void check_same_shape(const char* op, const Tensor& a, const Tensor& b) {
  require(a.shape() == b.shape(), std::string(op) + ": shape mismatch " + shape_str(a.shape()) +
                                      " vs " + shape_str(b.shape()));
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Elementwise ops

enum class EwOp { kAdd, kSub, kMul, kSigmoid, kTanh, kSquare };

inline Tensor add(const Tensor& a, const Tensor& b) {
  detail::check_same_shape("add", a, b);
  std::vector<float> out(a.data());
  for (size_t i = 0; i < out.size(); ++i) out[i] += b.data()[i];
  auto pa = a.node(), pb = b.node();
  return detail::make_result(a.shape(), std::move(out), {pa, pb}, [pa, pb](detail::Node& n) {
    if (pa->requires_grad) {
      auto& g = pa->grad_buf();
      for (size_t i = 0; i < g.size(); ++i) g[i] += n.grad[i];
    }
    if (pb->requires_grad) {
      auto& g = pb->grad_buf();
      for (size_t i = 0; i < g.size(); ++i) g[i] += n.grad[i];
    }
  });
}

inline Tensor sub(const Tensor& a, const Tensor& b) {
  detail::check_same_shape("sub", a, b);
  std::vector<float> out(a.data());
  for (size_t i = 0; i < out.size(); ++i) out[i] -= b.data()[i];
  auto pa = a.node(), pb = b.node();
  return detail::make_result(a.shape(), std::move(out), {pa, pb}, [pa, pb](detail::Node& n) {
    if (pa->requires_grad) {
      auto& g = pa->grad_buf();
      for (size_t i = 0; i < g.size(); ++i) g[i] += n.grad[i];
    }
    if (pb->requires_grad) {
      auto& g = pb->grad_buf();
      for (size_t i = 0; i < g.size(); ++i) g[i] -= n.grad[i];
    }
  });
}

inline Tensor mul(const Tensor& a, const Tensor& b) {
  detail::check_same_shape("mul", a, b);
  std::vector<float> out(a.data());
  for (size_t i = 0; i < out.size(); ++i) out[i] *= b.data()[i];
  auto pa = a.node(), pb = b.node();
  return detail::make_result(a.shape(), std::move(out), {pa, pb}, [pa, pb](detail::Node& n) {
    if (pa->requires_grad) {
      auto& g = pa->grad_buf();
      for (size_t i = 0; i < g.size(); ++i) g[i] += n.grad[i] * pb->data[i];
    }
    if (pb->requires_grad) {
      auto& g = pb->grad_buf();
      for (size_t i = 0; i < g.size(); ++i) g[i] += n.grad[i] * pa->data[i];
    }
  });
}

inline Tensor add_scalar(const Tensor& a, float s) {
  std::vector<float> out(a.data());
  for (auto& v : out) v += s;
  auto pa = a.node();
  return detail::make_result(a.shape(), std::move(out), {pa}, [pa](detail::Node& n) {
    auto& g = pa->grad_buf();
    for (size_t i = 0; i < g.size(); ++i) g[i] += n.grad[i];
  });
}

inline Tensor mul_scalar(const Tensor& a, float s) {
  std::vector<float> out(a.data());
  for (auto& v : out) v *= s;
  auto pa = a.node();
  return detail::make_result(a.shape(), std::move(out), {pa}, [pa, s](detail::Node& n) {
    auto& g = pa->grad_buf();
    for (size_t i = 0; i < g.size(); ++i) g[i] += n.grad[i] * s;
  });
}

inline Tensor sigmoid(const Tensor& a) {
  std::vector<float> out(a.data());
  for (auto& v : out) v = 1.0f / (1.0f + std::exp(-v));
  auto pa = a.node();
  auto saved = out;
  return detail::make_result(a.shape(), std::move(out), {pa},
                             [pa, saved = std::move(saved)](detail::Node& n) {
                               auto& g = pa->grad_buf();
                               for (size_t i = 0; i < g.size(); ++i)
                                 g[i] += n.grad[i] * saved[i] * (1.0f - saved[i]);
                             });
}

inline Tensor tanh_op(const Tensor& a) {
  std::vector<float> out(a.data());
  for (auto& v : out) v = std::tanh(v);
  auto pa = a.node();
  auto saved = out;
  return detail::make_result(a.shape(), std::move(out), {pa},
                             [pa, saved = std::move(saved)](detail::Node& n) {
                               auto& g = pa->grad_buf();
                               for (size_t i = 0; i < g.size(); ++i)
                                 g[i] += n.grad[i] * (1.0f - saved[i] * saved[i]);
                             });
}

inline Tensor square(const Tensor& a) {
  std::vector<float> out(a.data());
  for (auto& v : out) v *= v;
  auto pa = a.node();
  return detail::make_result(a.shape(), std::move(out), {pa}, [pa](detail::Node& n) {
    auto& g = pa->grad_buf();
    for (size_t i = 0; i < g.size(); ++i) g[i] += n.grad[i] * 2.0f * pa->data[i];
  });
}

/// |x|, with the subgradient at 0 taken as 0.
inline Tensor abs_op(const Tensor& a) {
  std::vector<float> out(a.data());
  for (auto& v : out) v = std::fabs(v);
  auto pa = a.node();
  return detail::make_result(a.shape(), std::move(out), {pa}, [pa](detail::Node& n) {
    auto& g = pa->grad_buf();
    for (size_t i = 0; i < g.size(); ++i) {
      float x = pa->data[i];
      float sign = (x > 0.0f) ? 1.0f : (x < 0.0f ? -1.0f : 0.0f);
      g[i] += n.grad[i] * sign;
    }
  });
}

/// The uniform elementwise entry point. Binary kinds accept a tensor or
/// scalar right operand; sigmoid/tanh/square ignore the right operand.
inline Tensor elementwise(EwOp op, const Tensor& a, const Tensor& b) {
  switch (op) {
    case EwOp::kAdd: return add(a, b);
    case EwOp::kSub: return sub(a, b);
    case EwOp::kMul: return mul(a, b);
    case EwOp::kSigmoid: return sigmoid(a);
    case EwOp::kTanh: return tanh_op(a);
    case EwOp::kSquare: return square(a);
  }
  fail("elementwise: bad op kind");
}

inline Tensor elementwise(EwOp op, const Tensor& a, float b) {
  switch (op) {
    case EwOp::kAdd: return add_scalar(a, b);
    case EwOp::kSub: return add_scalar(a, -b);
    case EwOp::kMul: return mul_scalar(a, b);
    case EwOp::kSigmoid: return sigmoid(a);
    case EwOp::kTanh: return tanh_op(a);
    case EwOp::kSquare: return square(a);
  }
  fail("elementwise: bad op kind");
}

inline Tensor elementwise(EwOp op, const Tensor& a) { return elementwise(op, a, 0.0f); }

// ---------------------------------------------------------------------------
// Reductions

inline Tensor sum(const Tensor& a) {
  double acc = 0.0;
  for (float v : a.data()) acc += v;
  auto pa = a.node();
  return detail::make_result({1}, {static_cast<float>(acc)}, {pa}, [pa](detail::Node& n) {
    auto& g = pa->grad_buf();
    for (auto& v : g) v += n.grad[0];
  });
}

inline Tensor mean(const Tensor& a) {
  require(a.numel() > 0, "mean of empty tensor");
  double acc = 0.0;
  for (float v : a.data()) acc += v;
  float inv = 1.0f / static_cast<float>(a.numel());
  auto pa = a.node();
  return detail::make_result({1}, {static_cast<float>(acc) * inv}, {pa},
                             [pa, inv](detail::Node& n) {
                               auto& g = pa->grad_buf();
                               for (auto& v : g) v += n.grad[0] * inv;
                             });
}

// ---------------------------------------------------------------------------
// Linear algebra / network ops

inline Tensor matmul(const Tensor& a, const Tensor& b) {
  require(a.shape().size() == 2 && b.shape().size() == 2,
          "matmul: rank-2 tensors required, got " + shape_str(a.shape()) + " and " +
              shape_str(b.shape()));
  const int m = a.shape()[0], k = a.shape()[1], k2 = b.shape()[0], n = b.shape()[1];
  require(k == k2, "matmul: inner dimensions differ, " + shape_str(a.shape()) + " x " +
                       shape_str(b.shape()));
  std::vector<float> out(static_cast<size_t>(m) * n, 0.0f);
  detail::gemm_nn(a.data().data(), b.data().data(), out.data(), m, k, n);
  auto pa = a.node(), pb = b.node();
  return detail::make_result({m, n}, std::move(out), {pa, pb},
                             [pa, pb, m, k, n](detail::Node& node) {
                               if (pa->requires_grad)
                                 detail::gemm_nt(node.grad.data(), pb->data.data(),
                                                 pa->grad_buf().data(), m, n, k);
                               if (pb->requires_grad)
                                 detail::gemm_tn(pa->data.data(), node.grad.data(),
                                                 pb->grad_buf().data(), k, m, n);
                             });
}

namespace detail {

// Gathers the padded input into a (c_in*kw x t_out) patch matrix so the
// convolution becomes one GEMM.
inline std::vector<float> im2col(const float* x, int c_in, int t, int kw, int stride, int pad,
                                 int t_out) {
  std::vector<float> col(static_cast<size_t>(c_in) * kw * t_out, 0.0f);
  for (int c = 0; c < c_in; ++c) {
    const float* xc = x + static_cast<size_t>(c) * t;
    for (int k = 0; k < kw; ++k) {
      float* crow = col.data() + (static_cast<size_t>(c) * kw + k) * t_out;
      for (int j = 0; j < t_out; ++j) {
        int src = j * stride + k - pad;
        if (src >= 0 && src < t) crow[j] = xc[src];
      }
    }
  }
  return col;
}

inline void col2im_acc(const float* col, float* gx, int c_in, int t, int kw, int stride, int pad,
                       int t_out) {
  for (int c = 0; c < c_in; ++c) {
    float* gc = gx + static_cast<size_t>(c) * t;
    for (int k = 0; k < kw; ++k) {
      const float* crow = col + (static_cast<size_t>(c) * kw + k) * t_out;
      for (int j = 0; j < t_out; ++j) {
        int src = j * stride + k - pad;
        if (src >= 0 && src < t) gc[src] += crow[j];
      }
    }
  }
}

}  // namespace detail

/// 1-D cross-correlation (no kernel flip). input: [c_in x t], kernels:
/// [c_out x c_in x kw]. Output length is floor((t + 2*pad - kw)/stride) + 1.
inline Tensor conv1d(const Tensor& input, const Tensor& kernels, int stride = 1, int padding = 0) {
  require(input.shape().size() == 2, "conv1d: input must be rank 2, got " +
                                         shape_str(input.shape()));
  require(kernels.shape().size() == 3, "conv1d: kernels must be rank 3, got " +
                                           shape_str(kernels.shape()));
  require(stride >= 1, "conv1d: stride must be positive");
  require(padding >= 0, "conv1d: padding must be nonnegative");
  const int c_in = input.shape()[0], t = input.shape()[1];
  const int c_out = kernels.shape()[0], kc_in = kernels.shape()[1], kw = kernels.shape()[2];
  require(kc_in == c_in, "conv1d: kernel expects " + std::to_string(kc_in) +
                             " input channels, input has " + std::to_string(c_in));
  require(kw <= t + 2 * padding, "conv1d: kernel width " + std::to_string(kw) +
                                     " exceeds padded input length " +
                                     std::to_string(t + 2 * padding));
  const int t_out = (t + 2 * padding - kw) / stride + 1;

  auto col = detail::im2col(input.data().data(), c_in, t, kw, stride, padding, t_out);
  std::vector<float> out(static_cast<size_t>(c_out) * t_out, 0.0f);
  detail::gemm_nn(kernels.data().data(), col.data(), out.data(), c_out,
                  static_cast<size_t>(c_in) * kw, t_out);

  auto px = input.node(), pw = kernels.node();
  return detail::make_result(
      {c_out, t_out}, std::move(out), {px, pw},
      [px, pw, col = std::move(col), c_in, t, kw, stride, padding, t_out,
       c_out](detail::Node& node) {
        const size_t ck = static_cast<size_t>(c_in) * kw;
        if (pw->requires_grad)
          detail::gemm_nt(node.grad.data(), col.data(), pw->grad_buf().data(), c_out, t_out, ck);
        if (px->requires_grad) {
          std::vector<float> gcol(ck * t_out, 0.0f);
          detail::gemm_tn(pw->data.data(), node.grad.data(), gcol.data(), ck, c_out, t_out);
          detail::col2im_acc(gcol.data(), px->grad_buf().data(), c_in, t, kw, stride, padding,
                             t_out);
        }
      });
}

/// Adds a per-channel bias vector [c] over a [c x t] map.
inline Tensor add_channel_bias(const Tensor& x, const Tensor& bias) {
  require(x.shape().size() == 2, "add_channel_bias: input must be rank 2");
  const int c = x.shape()[0], t = x.shape()[1];
  require(bias.shape() == Shape{c}, "add_channel_bias: bias shape " + shape_str(bias.shape()) +
                                        " does not match channel count " + std::to_string(c));
  std::vector<float> out(x.data());
  for (int i = 0; i < c; ++i) {
    const float b = bias.data()[i];
    for (int j = 0; j < t; ++j) out[static_cast<size_t>(i) * t + j] += b;
  }
  auto px = x.node(), pb = bias.node();
  return detail::make_result({c, t}, std::move(out), {px, pb}, [px, pb, c, t](detail::Node& n) {
    if (px->requires_grad) {
      auto& g = px->grad_buf();
      for (size_t i = 0; i < g.size(); ++i) g[i] += n.grad[i];
    }
    if (pb->requires_grad) {
      auto& g = pb->grad_buf();
      for (int i = 0; i < c; ++i) {
        float acc = 0.0f;
        for (int j = 0; j < t; ++j) acc += n.grad[static_cast<size_t>(i) * t + j];
        g[i] += acc;
      }
    }
  });
}

/// Gated linear unit over a [2c x t] map: out = A * sigmoid(B) with A the
/// first c rows and B the last c rows.
inline Tensor glu(const Tensor& x) {
  require(x.shape().size() == 2, "glu: input must be rank 2, got " + shape_str(x.shape()));
  const int c2 = x.shape()[0], t = x.shape()[1];
  require(c2 % 2 == 0, "glu: channel count must be even, got " + std::to_string(c2));
  const int c = c2 / 2;
  std::vector<float> out(static_cast<size_t>(c) * t);
  std::vector<float> gate(out.size());
  const auto& xd = x.data();
  for (int i = 0; i < c; ++i) {
    for (int j = 0; j < t; ++j) {
      const size_t oi = static_cast<size_t>(i) * t + j;
      const float a = xd[oi];
      const float b = xd[static_cast<size_t>(i + c) * t + j];
      const float s = 1.0f / (1.0f + std::exp(-b));
      gate[oi] = s;
      out[oi] = a * s;
    }
  }
  auto px = x.node();
  return detail::make_result({c, t}, std::move(out), {px},
                             [px, gate = std::move(gate), c, t](detail::Node& n) {
                               auto& g = px->grad_buf();
                               for (int i = 0; i < c; ++i) {
                                 for (int j = 0; j < t; ++j) {
                                   const size_t oi = static_cast<size_t>(i) * t + j;
                                   const size_t bi = static_cast<size_t>(i + c) * t + j;
                                   const float s = gate[oi];
                                   const float a = px->data[oi];
                                   g[oi] += n.grad[oi] * s;
                                   g[bi] += n.grad[oi] * a * s * (1.0f - s);
                                 }
                               }
                             });
}

/// Per-channel normalization over the time axis of a [c x t] map, followed
/// by a learned gain and bias. Uses the population variance.
inline Tensor instance_norm(const Tensor& x, const Tensor& gain, const Tensor& bias,
                            float epsilon = 1e-5f) {
  require(x.shape().size() == 2, "instance_norm: input must be rank 2");
  const int c = x.shape()[0], t = x.shape()[1];
  require(t >= 1, "instance_norm: empty time axis");
  require(gain.shape() == Shape{c} && bias.shape() == Shape{c},
          "instance_norm: gain/bias must have shape [" + std::to_string(c) + "]");

  std::vector<float> xhat(static_cast<size_t>(c) * t);
  std::vector<float> inv_std(c);
  std::vector<float> out(xhat.size());
  const auto& xd = x.data();
  for (int i = 0; i < c; ++i) {
    const float* xr = xd.data() + static_cast<size_t>(i) * t;
    double m = 0.0;
    for (int j = 0; j < t; ++j) m += xr[j];
    m /= t;
    double var = 0.0;
    for (int j = 0; j < t; ++j) {
      double d = xr[j] - m;
      var += d * d;
    }
    var /= t;
    const float is = 1.0f / std::sqrt(static_cast<float>(var) + epsilon);
    inv_std[i] = is;
    const float g = gain.data()[i], b = bias.data()[i];
    for (int j = 0; j < t; ++j) {
      const size_t oi = static_cast<size_t>(i) * t + j;
      const float xh = (xr[j] - static_cast<float>(m)) * is;
      xhat[oi] = xh;
      out[oi] = g * xh + b;
    }
  }

  auto px = x.node(), pg = gain.node(), pb = bias.node();
  return detail::make_result(
      {c, t}, std::move(out), {px, pg, pb},
      [px, pg, pb, xhat = std::move(xhat), inv_std = std::move(inv_std), c, t](detail::Node& n) {
        for (int i = 0; i < c; ++i) {
          const size_t off = static_cast<size_t>(i) * t;
          const float g = pg->data[i];
          double sum_dy = 0.0, sum_dy_xhat = 0.0;
          for (int j = 0; j < t; ++j) {
            sum_dy += n.grad[off + j];
            sum_dy_xhat += n.grad[off + j] * xhat[off + j];
          }
          if (pg->requires_grad) pg->grad_buf()[i] += static_cast<float>(sum_dy_xhat);
          if (pb->requires_grad) pb->grad_buf()[i] += static_cast<float>(sum_dy);
          if (px->requires_grad) {
            auto& gx = px->grad_buf();
            const float mean_dy = static_cast<float>(sum_dy / t);
            const float mean_dy_xhat = static_cast<float>(sum_dy_xhat / t);
            const float scale = g * inv_std[i];
            for (int j = 0; j < t; ++j)
              gx[off + j] += scale * (n.grad[off + j] - mean_dy - xhat[off + j] * mean_dy_xhat);
          }
        }
      });
}

/// Nearest-neighbor x2 upsampling along the time axis of a [c x t] map.
inline Tensor upsample_nearest_x2(const Tensor& x) {
  require(x.shape().size() == 2, "upsample_nearest_x2: input must be rank 2");
  const int c = x.shape()[0], t = x.shape()[1];
  std::vector<float> out(static_cast<size_t>(c) * t * 2);
  const auto& xd = x.data();
  for (int i = 0; i < c; ++i)
    for (int j = 0; j < t; ++j) {
      const float v = xd[static_cast<size_t>(i) * t + j];
      out[(static_cast<size_t>(i) * t + j) * 2] = v;
      out[(static_cast<size_t>(i) * t + j) * 2 + 1] = v;
    }
  auto px = x.node();
  return detail::make_result({c, 2 * t}, std::move(out), {px}, [px, c, t](detail::Node& n) {
    auto& g = px->grad_buf();
    for (int i = 0; i < c; ++i)
      for (int j = 0; j < t; ++j)
        g[static_cast<size_t>(i) * t + j] += n.grad[(static_cast<size_t>(i) * t + j) * 2] +
                                             n.grad[(static_cast<size_t>(i) * t + j) * 2 + 1];
  });
}

// ---------------------------------------------------------------------------
// Backward pass

/// Accumulates dLoss/dx into the grad buffer of every requires_grad ancestor
/// of `loss`. Interior (non-leaf) grads are reset per call, so calling twice
/// doubles leaf gradients rather than compounding stale state.
inline void backward(const Tensor& loss) {
  require(loss.numel() == 1, "backward: loss must be a scalar, got " + shape_str(loss.shape()));
  if (!loss.requires_grad()) return;

  // Iterative post-order topological sort.
  std::vector<detail::Node*> order;
  std::unordered_set<detail::Node*> visited;
  std::vector<std::pair<detail::Node*, size_t>> stack;
  stack.emplace_back(loss.node().get(), 0);
  visited.insert(loss.node().get());
  while (!stack.empty()) {
    auto& [node, idx] = stack.back();
    if (idx < node->parents.size()) {
      detail::Node* p = node->parents[idx].get();
      ++idx;
      if (p->requires_grad && !visited.count(p)) {
        visited.insert(p);
        stack.emplace_back(p, 0);
      }
    } else {
      order.push_back(node);
      stack.pop_back();
    }
  }

  for (detail::Node* n : order)
    if (n->backprop) std::fill(n->grad_buf().begin(), n->grad_buf().end(), 0.0f);

  loss.node()->grad_buf()[0] += 1.0f;
  for (auto it = order.rbegin(); it != order.rend(); ++it)
    if ((*it)->backprop) (*it)->backprop(**it);
}

}  // namespace vcforge::nn
