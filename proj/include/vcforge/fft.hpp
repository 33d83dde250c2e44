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

#include <cmath>
#include <complex>
#include <cstddef>
#include <numbers>
#include <vector>

#include "vcforge/errors.hpp"

namespace vcforge::dsp {

inline bool is_power_of_two(size_t n) { return n != 0 && (n & (n - 1)) == 0; }

inline size_t next_power_of_two(size_t n) {
  size_t p = 1;
  while (p < n) p <<= 1;
  return p;
}

/// In-place iterative radix-2 transform. `inverse` applies the conjugate
/// transform and the 1/n scale. Double precision throughout.
inline void fft_inplace(std::vector<std::complex<double>>& a, bool inverse = false) {
  const size_t n = a.size();
  require(is_power_of_two(n), "fft: length must be a power of two, got " + std::to_string(n));
  if (n <= 1) return;

  for (size_t i = 1, j = 0; i < n; ++i) {
    size_t bit = n >> 1;
    for (; j & bit; bit >>= 1) j ^= bit;
    j ^= bit;
    if (i < j) std::swap(a[i], a[j]);
  }

  for (size_t len = 2; len <= n; len <<= 1) {
    const double ang = (inverse ? 2.0 : -2.0) * std::numbers::pi / static_cast<double>(len);
    const std::complex<double> wlen(std::cos(ang), std::sin(ang));
    for (size_t i = 0; i < n; i += len) {
      std::complex<double> w(1.0, 0.0);
      for (size_t j = 0; j < len / 2; ++j) {
        const std::complex<double> u = a[i + j];
        const std::complex<double> v = a[i + j + len / 2] * w;
        a[i + j] = u + v;
        a[i + j + len / 2] = u - v;
        w *= wlen;
      }
    }
  }

  if (inverse) {
    const double inv = 1.0 / static_cast<double>(n);
    for (auto& x : a) x *= inv;
  }
}

/// Forward transform of a real frame zero-padded to n_fft; returns the full
/// complex spectrum of length n_fft.
inline std::vector<std::complex<double>> rfft(const float* frame, size_t frame_len, size_t n_fft) {
  std::vector<std::complex<double>> a(n_fft, {0.0, 0.0});
  for (size_t i = 0; i < frame_len; ++i) a[i] = {static_cast<double>(frame[i]), 0.0};
  fft_inplace(a, false);
  return a;
}

/// Fills bins above n_fft/2 by conjugate symmetry and inverts.
inline std::vector<double> irfft_half_spectrum(std::vector<std::complex<double>> half,
                                               size_t n_fft) {
  require(half.size() == n_fft / 2 + 1, "irfft: expected n_fft/2+1 bins");
  std::vector<std::complex<double>> full(n_fft);
  for (size_t k = 0; k <= n_fft / 2; ++k) full[k] = half[k];
  for (size_t k = n_fft / 2 + 1; k < n_fft; ++k) full[k] = std::conj(half[n_fft - k]);
  fft_inplace(full, true);
  std::vector<double> out(n_fft);
  for (size_t i = 0; i < n_fft; ++i) out[i] = full[i].real();
  return out;
}

}  // namespace vcforge::dsp
