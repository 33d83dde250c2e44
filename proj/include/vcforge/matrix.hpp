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

#include <cstddef>
#include <vector>

#include "vcforge/errors.hpp"

namespace vcforge {

/// Dense row-major matrix. Thin value type; no arithmetic beyond indexing.
template <typename T>
struct Mat {
  size_t rows = 0;
  size_t cols = 0;
  std::vector<T> v;

  Mat() = default;
  Mat(size_t r, size_t c, T fill = T(0)) : rows(r), cols(c), v(r * c, fill) {}

  T& operator()(size_t r, size_t c) { return v[r * cols + c]; }
  const T& operator()(size_t r, size_t c) const { return v[r * cols + c]; }

  T* row(size_t r) { return v.data() + r * cols; }
  const T* row(size_t r) const { return v.data() + r * cols; }

  bool empty() const { return rows == 0 || cols == 0; }

  template <typename U>
  Mat<U> cast() const {
    Mat<U> out(rows, cols);
    for (size_t i = 0; i < v.size(); ++i) out.v[i] = static_cast<U>(v[i]);
    return out;
  }

  Mat<T> transposed() const {
    Mat<T> out(cols, rows);
    for (size_t r = 0; r < rows; ++r)
      for (size_t c = 0; c < cols; ++c) out(c, r) = (*this)(r, c);
    return out;
  }
};

}  // namespace vcforge
