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

// Test-only double-precision reference implementations. These are written
// straight from the mathematical definitions (naive loops, no shared code
// with the library) so they can serve as independent oracles for forward
// values and for central finite differences.

#include <cmath>
#include <cstddef>
#include <vector>

namespace refops {

using Vec = std::vector<double>;

inline Vec add(const Vec& a, const Vec& b) {
  Vec o(a.size());
  for (size_t i = 0; i < a.size(); ++i) o[i] = a[i] + b[i];
  return o;
}

inline Vec sub(const Vec& a, const Vec& b) {
  Vec o(a.size());
  for (size_t i = 0; i < a.size(); ++i) o[i] = a[i] - b[i];
  return o;
}

inline Vec mul(const Vec& a, const Vec& b) {
  Vec o(a.size());
  for (size_t i = 0; i < a.size(); ++i) o[i] = a[i] * b[i];
  return o;
}

inline Vec sigmoid(const Vec& a) {
  Vec o(a.size());
  for (size_t i = 0; i < a.size(); ++i) o[i] = 1.0 / (1.0 + std::exp(-a[i]));
  return o;
}

inline Vec tanh_v(const Vec& a) {
  Vec o(a.size());
  for (size_t i = 0; i < a.size(); ++i) o[i] = std::tanh(a[i]);
  return o;
}

inline Vec square(const Vec& a) {
  Vec o(a.size());
  for (size_t i = 0; i < a.size(); ++i) o[i] = a[i] * a[i];
  return o;
}

inline Vec abs_v(const Vec& a) {
  Vec o(a.size());
  for (size_t i = 0; i < a.size(); ++i) o[i] = std::fabs(a[i]);
  return o;
}

inline double sum(const Vec& a) {
  double s = 0.0;
  for (double v : a) s += v;
  return s;
}

inline double mean(const Vec& a) { return sum(a) / static_cast<double>(a.size()); }

/// Naive triple-loop matrix product: a is (m x k), b is (k x n), row-major.
inline Vec matmul(const Vec& a, const Vec& b, int m, int k, int n) {
  Vec o(static_cast<size_t>(m) * n, 0.0);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < n; ++j) {
      double acc = 0.0;
      for (int p = 0; p < k; ++p) acc += a[i * k + p] * b[p * n + j];
      o[i * n + j] = acc;
    }
  return o;
}

/// Direct-summation cross-correlation. x: [c_in x t], w: [c_out x c_in x kw].
inline Vec conv1d(const Vec& x, const Vec& w, int c_in, int t, int c_out, int kw, int stride,
                  int pad) {
  const int t_out = (t + 2 * pad - kw) / stride + 1;
  Vec o(static_cast<size_t>(c_out) * t_out, 0.0);
  for (int co = 0; co < c_out; ++co)
    for (int j = 0; j < t_out; ++j) {
      double acc = 0.0;
      for (int ci = 0; ci < c_in; ++ci)
        for (int k = 0; k < kw; ++k) {
          const int src = j * stride + k - pad;
          if (src >= 0 && src < t) acc += x[ci * t + src] * w[(co * c_in + ci) * kw + k];
        }
      o[co * t_out + j] = acc;
    }
  return o;
}

inline Vec add_channel_bias(const Vec& x, const Vec& b, int c, int t) {
  Vec o(x);
  for (int i = 0; i < c; ++i)
    for (int j = 0; j < t; ++j) o[i * t + j] += b[i];
  return o;
}

inline Vec glu(const Vec& x, int c2, int t) {
  const int c = c2 / 2;
  Vec o(static_cast<size_t>(c) * t);
  for (int i = 0; i < c; ++i)
    for (int j = 0; j < t; ++j)
      o[i * t + j] = x[i * t + j] / (1.0 + std::exp(-x[(i + c) * t + j]));
  return o;
}

inline Vec instance_norm(const Vec& x, const Vec& gain, const Vec& bias, int c, int t,
                         double eps) {
  Vec o(x.size());
  for (int i = 0; i < c; ++i) {
    double m = 0.0;
    for (int j = 0; j < t; ++j) m += x[i * t + j];
    m /= t;
    double var = 0.0;
    for (int j = 0; j < t; ++j) var += (x[i * t + j] - m) * (x[i * t + j] - m);
    var /= t;
    const double is = 1.0 / std::sqrt(var + eps);
    for (int j = 0; j < t; ++j) o[i * t + j] = gain[i] * (x[i * t + j] - m) * is + bias[i];
  }
  return o;
}

inline Vec upsample_x2(const Vec& x, int c, int t) {
  Vec o(static_cast<size_t>(c) * t * 2);
  for (int i = 0; i < c; ++i)
    for (int j = 0; j < t; ++j) {
      o[(i * t + j) * 2] = x[i * t + j];
      o[(i * t + j) * 2 + 1] = x[i * t + j];
    }
  return o;
}

/// Central finite difference of a scalar-valued function with respect to one
/// entry of `x`.
template <typename F>
double central_diff(F&& f, Vec& x, size_t i, double h = 1e-3) {
  const double saved = x[i];
  x[i] = saved + h;
  const double up = f();
  x[i] = saved - h;
  const double down = f();
  x[i] = saved;
  return (up - down) / (2.0 * h);
}

}  // namespace refops
