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

// Mel-cepstral analysis: magnitude spectrum -> triangular mel filterbank ->
// log -> orthonormal DCT-II, and the inverse map back to a linear-frequency
// spectral envelope for synthesis.

#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

#include "vcforge/errors.hpp"
#include "vcforge/matrix.hpp"
#include "vcforge/stft.hpp"

namespace vcforge::dsp {

inline constexpr int kMelBands = 26;
inline constexpr int kCepstralOrder = 24;
inline constexpr float kLogFloor = 1e-10f;

inline double hz_to_mel(double hz) { return 2595.0 * std::log10(1.0 + hz / 700.0); }
inline double mel_to_hz(double mel) { return 700.0 * (std::pow(10.0, mel / 2595.0) - 1.0); }

/// Triangular mel filterbank. Each filter's weights are normalized to unit
/// sum so a flat magnitude spectrum maps to equal band energies.
class MelFilterbank {
 public:
  MelFilterbank(int n_bands, int n_fft, int sample_rate, double f_lo = 0.0, double f_hi = 8000.0)
      : n_bands_(n_bands), n_bins_(n_fft / 2 + 1) {
    require(n_bands >= 2, "mel filterbank: need at least 2 bands");
    require(f_hi > f_lo && f_hi <= sample_rate / 2.0 + 1e-9,
            "mel filterbank: band range must fit below Nyquist");
    const double mel_lo = hz_to_mel(f_lo), mel_hi = hz_to_mel(f_hi);
    std::vector<double> edges(n_bands + 2);
    for (int i = 0; i < n_bands + 2; ++i)
      edges[i] = mel_to_hz(mel_lo + (mel_hi - mel_lo) * i / static_cast<double>(n_bands + 1));
    centers_hz_.assign(edges.begin() + 1, edges.end() - 1);

    const double bin_hz = static_cast<double>(sample_rate) / n_fft;
    weights_ = Mat<double>(static_cast<size_t>(n_bands), static_cast<size_t>(n_bins_));
    for (int b = 0; b < n_bands; ++b) {
      const double lo = edges[b], mid = edges[b + 1], hi = edges[b + 2];
      double wsum = 0.0;
      for (int k = 0; k < n_bins_; ++k) {
        const double f = k * bin_hz;
        double w = 0.0;
        if (f > lo && f < mid)
          w = (f - lo) / (mid - lo);
        else if (f >= mid && f < hi)
          w = (hi - f) / (hi - mid);
        weights_(b, k) = w;
        wsum += w;
      }
      if (wsum > 0.0)
        for (int k = 0; k < n_bins_; ++k) weights_(b, k) /= wsum;
    }
  }

  int bands() const { return n_bands_; }
  int bins() const { return n_bins_; }
  const std::vector<double>& centers_hz() const { return centers_hz_; }

  /// Band energies of one magnitude frame (length bins()).
  std::vector<double> apply(const float* mag) const {
    std::vector<double> out(n_bands_, 0.0);
    for (int b = 0; b < n_bands_; ++b) {
      const double* wr = weights_.row(b);
      double acc = 0.0;
      for (int k = 0; k < n_bins_; ++k) acc += wr[k] * mag[k];
      out[b] = acc;
    }
    return out;
  }

 private:
  int n_bands_;
  int n_bins_;
  Mat<double> weights_;
  std::vector<double> centers_hz_;
};

/// Orthonormal DCT-II of `in[0..n)`, keeping the first `keep` coefficients.
inline void dct2_ortho(const double* in, int n, double* out, int keep) {
  for (int j = 0; j < keep; ++j) {
    double acc = 0.0;
    for (int i = 0; i < n; ++i)
      acc += in[i] * std::cos(std::numbers::pi * j * (2.0 * i + 1.0) / (2.0 * n));
    const double alpha = (j == 0) ? std::sqrt(1.0 / n) : std::sqrt(2.0 / n);
    out[j] = alpha * acc;
  }
}

/// Inverse of dct2_ortho from `keep` coefficients back to n samples.
inline void idct2_ortho(const double* in, int keep, double* out, int n) {
  for (int i = 0; i < n; ++i) {
    double acc = 0.0;
    for (int j = 0; j < keep; ++j) {
      const double alpha = (j == 0) ? std::sqrt(1.0 / n) : std::sqrt(2.0 / n);
      acc += alpha * in[j] * std::cos(std::numbers::pi * j * (2.0 * i + 1.0) / (2.0 * n));
    }
    out[i] = acc;
  }
}

/// Per-frame mel-cepstra of a magnitude spectrogram: filterbank energies,
/// floored log, DCT-II, first n_coeffs coefficients kept.
inline Mat<float> mel_cepstral_analysis(const Spectrogram& s, int n_coeffs = kCepstralOrder) {
  require(n_coeffs >= 1 && n_coeffs <= kMelBands,
          "mel_cepstral_analysis: coefficient count must be in [1, " +
              std::to_string(kMelBands) + "]");
  MelFilterbank fb(kMelBands, s.n_fft, s.sample_rate);
  Mat<float> out(s.frames(), static_cast<size_t>(n_coeffs));
  std::vector<double> cep(n_coeffs);
  for (size_t t = 0; t < s.frames(); ++t) {
    auto bands = fb.apply(s.mag.row(t));
    for (auto& e : bands) e = std::log(std::max(e, static_cast<double>(kLogFloor)));
    dct2_ortho(bands.data(), kMelBands, cep.data(), n_coeffs);
    for (int j = 0; j < n_coeffs; ++j) out(t, static_cast<size_t>(j)) = static_cast<float>(cep[j]);
  }
  return out;
}

namespace detail {

/// Piecewise-linear interpolation of per-band values across the band
/// centers, flat beyond the outermost centers.
inline std::vector<double> interp_bands_to_bins(const std::vector<double>& band_vals,
                                                const std::vector<double>& centers_hz,
                                                int bins, double bin_hz) {
  std::vector<double> out(bins);
  for (int k = 0; k < bins; ++k) {
    const double f = k * bin_hz;
    if (f <= centers_hz.front()) {
      out[k] = band_vals.front();
    } else if (f >= centers_hz.back()) {
      out[k] = band_vals.back();
    } else {
      const auto it = std::upper_bound(centers_hz.begin(), centers_hz.end(), f);
      const size_t hi = static_cast<size_t>(it - centers_hz.begin());
      const size_t lo = hi - 1;
      const double frac = (f - centers_hz[lo]) / (centers_hz[hi] - centers_hz[lo]);
      out[k] = (1.0 - frac) * band_vals[lo] + frac * band_vals[hi];
    }
  }
  return out;
}

}  // namespace detail

/// Inverse map used at synthesis time: cepstrum -> 26 log band energies ->
/// piecewise-linear interpolation (in the log domain) across band centers ->
/// exponentiated linear-frequency envelope of n_fft/2+1 bins.
///
/// Plain interpolation overshoots where the log envelope is strongly curved
/// (formant peaks, inter-formant valleys), so a few multiplicative
/// correction passes pull the envelope's filterbank image back onto the
/// target band energies.
inline std::vector<float> mel_cepstrum_to_envelope(const float* cepstrum, int n_coeffs, int n_fft,
                                                   int sample_rate) {
  MelFilterbank fb(kMelBands, n_fft, sample_rate);
  std::vector<double> cep(n_coeffs);
  for (int j = 0; j < n_coeffs; ++j) cep[j] = cepstrum[j];
  std::vector<double> log_bands(kMelBands);
  idct2_ortho(cep.data(), n_coeffs, log_bands.data(), kMelBands);

  const double bin_hz = static_cast<double>(sample_rate) / n_fft;
  const int bins = n_fft / 2 + 1;
  auto log_env = detail::interp_bands_to_bins(log_bands, fb.centers_hz(), bins, bin_hz);
  std::vector<double> env(bins);
  for (int k = 0; k < bins; ++k) env[k] = std::exp(log_env[k]);

  constexpr int kRefinePasses = 4;
  std::vector<float> env_f(bins);
  std::vector<double> log_ratio(kMelBands);
  for (int pass = 0; pass < kRefinePasses; ++pass) {
    for (int k = 0; k < bins; ++k) env_f[k] = static_cast<float>(env[k]);
    auto achieved = fb.apply(env_f.data());
    for (int b = 0; b < kMelBands; ++b)
      log_ratio[b] = log_bands[b] - std::log(std::max(achieved[b], 1e-30));
    auto corr = detail::interp_bands_to_bins(log_ratio, fb.centers_hz(), bins, bin_hz);
    for (int k = 0; k < bins; ++k) env[k] = std::max(env[k] * std::exp(corr[k]), 1e-30);
  }

  for (int k = 0; k < bins; ++k) env_f[k] = static_cast<float>(env[k]);
  return env_f;
}

}  // namespace vcforge::dsp
