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

// Fundamental-frequency tracking by normalized autocorrelation.

#include <algorithm>
#include <cmath>
#include <vector>

#include "vcforge/stft.hpp"
#include "vcforge/wav.hpp"

namespace vcforge::dsp {

inline constexpr double kF0Min = 50.0;
inline constexpr double kF0Max = 500.0;
inline constexpr double kVoicingThreshold = 0.3;
inline constexpr double kSilenceRms = 1e-4;

/// Per-frame F0 in Hz, 0 for unvoiced frames. Framing matches stft() so the
/// track aligns with the cepstral features one-to-one. The correlation
/// window is widened to twice the longest candidate lag (centered on the
/// frame) so low pitches near the 50 Hz bound stay measurable.
inline std::vector<float> estimate_f0(const Waveform& w, double frame_len_ms, double hop_ms) {
  const int frame = ms_to_samples(frame_len_ms, w.sample_rate);
  const int hop = ms_to_samples(hop_ms, w.sample_rate);
  require(frame > 0 && hop > 0, "estimate_f0: frame and hop must be positive");
  if (w.samples.size() < static_cast<size_t>(frame)) return {};

  const size_t t_frames = 1 + (w.samples.size() - frame) / hop;
  const int lag_min = static_cast<int>(std::floor(w.sample_rate / kF0Max));
  const int lag_max = static_cast<int>(std::ceil(w.sample_rate / kF0Min));
  const int win = std::max(frame, 2 * lag_max);

  std::vector<float> f0(t_frames, 0.0f);
  std::vector<double> r(static_cast<size_t>(lag_max) + 2, 0.0);

  for (size_t t = 0; t < t_frames; ++t) {
    const long center = static_cast<long>(t) * hop + frame / 2;
    const long start = std::clamp<long>(center - win / 2, 0, static_cast<long>(w.samples.size()));
    const long stop = std::min<long>(start + win, static_cast<long>(w.samples.size()));
    const int n = static_cast<int>(stop - start);
    if (n <= lag_min + 1) continue;
    const float* x = w.samples.data() + start;

    double energy = 0.0;
    for (int i = 0; i < n; ++i) energy += static_cast<double>(x[i]) * x[i];
    if (std::sqrt(energy / n) < kSilenceRms) continue;

    const int hi_lag = std::min(lag_max, n - 2);
    for (int lag = lag_min - 1; lag <= hi_lag + 1; ++lag) {
      if (lag < 1 || lag >= n) {
        r[lag < 1 ? 0 : static_cast<size_t>(lag)] = 0.0;
        continue;
      }
      double num = 0.0, e0 = 0.0, e1 = 0.0;
      for (int i = 0; i + lag < n; ++i) {
        num += static_cast<double>(x[i]) * x[i + lag];
        e0 += static_cast<double>(x[i]) * x[i];
        e1 += static_cast<double>(x[i + lag]) * x[i + lag];
      }
      r[static_cast<size_t>(lag)] = num / std::max(std::sqrt(e0 * e1), 1e-20);
    }

    // Local maxima with parabolic refinement of both position and value.
    // Comparing refined values matters: when the true period falls between
    // integer lags the sampled peak can read low while a multiple lands
    // exactly on a lag, and raw comparison would pick the sub-harmonic.
    struct Peak {
      double lag;
      double value;
    };
    std::vector<Peak> peaks;
    for (int lag = lag_min; lag <= hi_lag; ++lag) {
      if (!(r[lag] >= r[lag - 1] && r[lag] >= r[lag + 1])) continue;
      double lag_ref = lag, val_ref = r[lag];
      const double denom = r[lag - 1] - 2.0 * r[lag] + r[lag + 1];
      if (std::fabs(denom) > 1e-12) {
        const double delta = 0.5 * (r[lag - 1] - r[lag + 1]) / denom;
        if (std::fabs(delta) < 1.0) {
          lag_ref += delta;
          val_ref -= 0.25 * (r[lag - 1] - r[lag + 1]) * delta;
        }
      }
      peaks.push_back({lag_ref, val_ref});
    }
    if (peaks.empty()) continue;
    double best = 0.0;
    for (const auto& p : peaks) best = std::max(best, p.value);
    if (best < kVoicingThreshold) continue;

    // Earliest strong peak wins; this prefers the true period over its
    // multiples when the signal is strongly harmonic.
    double lag_pick = -1.0;
    for (const auto& p : peaks)
      if (p.value >= 0.9 * best) {
        lag_pick = p.lag;
        break;
      }
    if (lag_pick <= 0.0) continue;
    const double hz = std::clamp(w.sample_rate / lag_pick, kF0Min, kF0Max);
    f0[t] = static_cast<float>(hz);
  }
  return f0;
}

}  // namespace vcforge::dsp
