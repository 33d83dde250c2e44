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
#include <numbers>
#include <vector>

#include "vcforge/errors.hpp"
#include "vcforge/fft.hpp"
#include "vcforge/matrix.hpp"
#include "vcforge/wav.hpp"

namespace vcforge::dsp {

/// Magnitude/phase short-time spectra. Rows are frames, columns the
/// n_fft/2+1 nonnegative-frequency bins.
struct Spectrogram {
  Mat<float> mag;
  Mat<float> phase;  // radians
  int n_fft = 1024;
  double frame_len_ms = 20.0;
  double hop_ms = 10.0;
  int sample_rate = kTargetSampleRate;

  size_t frames() const { return mag.rows; }
  size_t bins() const { return mag.cols; }
};

inline int ms_to_samples(double ms, int sample_rate) {
  return static_cast<int>(std::lround(ms * sample_rate / 1000.0));
}

/// Periodic Hann window. With hop = len/2 adjacent windows sum to one,
/// which keeps the overlap-add denominators well conditioned.
inline std::vector<double> hann_window(int len) {
  std::vector<double> w(len);
  for (int i = 0; i < len; ++i)
    w[i] = 0.5 - 0.5 * std::cos(2.0 * std::numbers::pi * i / static_cast<double>(len));
  return w;
}

inline Spectrogram stft(const Waveform& w, double frame_len_ms, double hop_ms, int n_fft) {
  const int frame = ms_to_samples(frame_len_ms, w.sample_rate);
  const int hop = ms_to_samples(hop_ms, w.sample_rate);
  require(frame > 0 && hop > 0, "stft: frame and hop must be positive");
  require(static_cast<size_t>(n_fft) >= static_cast<size_t>(frame),
          "stft: n_fft " + std::to_string(n_fft) + " smaller than frame length " +
              std::to_string(frame));
  require(is_power_of_two(static_cast<size_t>(n_fft)), "stft: n_fft must be a power of two");
  require(w.samples.size() >= static_cast<size_t>(frame),
          "stft: waveform shorter than one frame (" + std::to_string(w.samples.size()) + " < " +
              std::to_string(frame) + " samples)");

  const size_t t_frames = 1 + (w.samples.size() - frame) / hop;
  const size_t bins = static_cast<size_t>(n_fft) / 2 + 1;
  const auto window = hann_window(frame);

  Spectrogram s;
  s.n_fft = n_fft;
  s.frame_len_ms = frame_len_ms;
  s.hop_ms = hop_ms;
  s.sample_rate = w.sample_rate;
  s.mag = Mat<float>(t_frames, bins);
  s.phase = Mat<float>(t_frames, bins);

  std::vector<float> buf(frame);
  for (size_t t = 0; t < t_frames; ++t) {
    const float* src = w.samples.data() + t * hop;
    for (int i = 0; i < frame; ++i) buf[i] = static_cast<float>(src[i] * window[i]);
    auto spec = rfft(buf.data(), frame, static_cast<size_t>(n_fft));
    for (size_t k = 0; k < bins; ++k) {
      s.mag(t, k) = static_cast<float>(std::abs(spec[k]));
      s.phase(t, k) = static_cast<float>(std::arg(spec[k]));
    }
  }
  return s;
}

/// Weighted overlap-add inverse: frames are windowed with the Hann synthesis
/// window and the result divided by the accumulated squared window, so the
/// analysis/synthesis pair reconstructs the interior exactly up to rounding.
inline Waveform istft(const Spectrogram& s, double hop_ms) {
  const int frame = ms_to_samples(s.frame_len_ms, s.sample_rate);
  const int hop = ms_to_samples(hop_ms, s.sample_rate);
  require(frame > 0 && hop > 0, "istft: frame and hop must be positive");
  require(s.mag.rows == s.phase.rows && s.mag.cols == s.phase.cols,
          "istft: magnitude/phase shape mismatch");
  const size_t bins = static_cast<size_t>(s.n_fft) / 2 + 1;
  require(s.mag.cols == bins, "istft: bin count does not match n_fft");

  Waveform out;
  out.sample_rate = s.sample_rate;
  if (s.mag.rows == 0) return out;

  const size_t out_len = static_cast<size_t>(s.mag.rows - 1) * hop + frame;
  std::vector<double> acc(out_len, 0.0);
  std::vector<double> norm(out_len, 0.0);
  const auto window = hann_window(frame);

  std::vector<std::complex<double>> half(bins);
  for (size_t t = 0; t < s.mag.rows; ++t) {
    for (size_t k = 0; k < bins; ++k)
      half[k] = std::polar(static_cast<double>(s.mag(t, k)), static_cast<double>(s.phase(t, k)));
    auto frame_sig = irfft_half_spectrum(half, static_cast<size_t>(s.n_fft));
    const size_t off = t * hop;
    for (int i = 0; i < frame; ++i) {
      acc[off + i] += window[i] * frame_sig[i];
      norm[off + i] += window[i] * window[i];
    }
  }

  out.samples.resize(out_len);
  for (size_t i = 0; i < out_len; ++i)
    out.samples[i] = static_cast<float>(acc[i] / std::max(norm[i], 1e-8));
  return out;
}

}  // namespace vcforge::dsp
