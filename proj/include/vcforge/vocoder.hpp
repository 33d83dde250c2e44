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

// Pulse/noise resynthesis from mel-cepstral features.
//
// Per frame, an excitation segment (pulse train at the frame's F0 for voiced
// frames, white noise for unvoiced) is windowed and transformed, multiplied
// by the envelope decoded from the frame's cepstrum, and overlap-added.
//
// A plain envelope multiply cannot reproduce the analysis band energies: the
// excitation's own comb or noise realization rides on top of it, and bands
// holding one harmonic end up several dB off. So after the envelope multiply
// the per-band gains are corrected multiplicatively until the filtered
// frame's filterbank image matches the band energies encoded in the
// cepstrum. The correction is a smooth (band-interpolated) gain curve, so
// the excitation keeps its fine structure and phase coherence while the
// frame lands on the analyzed spectral shape.

#include <algorithm>
#include <cmath>
#include <complex>
#include <vector>

#include "vcforge/features.hpp"
#include "vcforge/fft.hpp"
#include "vcforge/mel.hpp"
#include "vcforge/rng.hpp"
#include "vcforge/stft.hpp"
#include "vcforge/wav.hpp"

namespace vcforge::dsp {

inline constexpr uint64_t kVocoderNoiseSeed = 0x5EEDF00DULL;  // fixed: output is deterministic
inline constexpr float kSynthesisPeak = 0.9f;

inline Waveform synthesize(const FeatureSequence& f, int sample_rate = kTargetSampleRate) {
  Waveform out;
  out.sample_rate = sample_rate;
  if (f.frames() == 0) return out;
  validate_feature_sequence(f, "synthesize");

  const int frame = ms_to_samples(f.frame_len_ms, sample_rate);
  const int hop = ms_to_samples(f.frame_hop_ms, sample_rate);
  const int n_fft = static_cast<int>(next_power_of_two(frame));
  const size_t bins = static_cast<size_t>(n_fft) / 2 + 1;
  const size_t t_frames = f.frames();
  const size_t out_len = (t_frames - 1) * hop + frame;

  // Continuous excitation built across the whole utterance so pulse phase
  // carries over frame boundaries.
  std::vector<float> excitation(out_len, 0.0f);
  SplitMix64 noise(kVocoderNoiseSeed);
  double phase = 0.0;
  for (size_t n = 0; n < out_len; ++n) {
    const size_t t = std::min(n / hop, t_frames - 1);
    const float hz = f.f0[t];
    if (hz > 0.0f) {
      phase += hz / sample_rate;
      if (phase >= 1.0) {
        phase -= 1.0;
        excitation[n] = 1.0f;
      }
    } else {
      phase = 0.0;
      excitation[n] = noise.uniform_float(-1.0f, 1.0f);
    }
  }

  const auto window = hann_window(frame);
  MelFilterbank fb(kMelBands, n_fft, sample_rate);
  const double bin_hz = static_cast<double>(sample_rate) / n_fft;
  std::vector<double> acc(out_len, 0.0), norm(out_len, 0.0);
  std::vector<std::complex<double>> half(bins);
  std::vector<float> wbuf(frame), shaped_mag(bins);
  std::vector<double> gain(bins), cep(f.dim()), target_log_bands(kMelBands),
      log_ratio(kMelBands);

  for (size_t t = 0; t < t_frames; ++t) {
    for (size_t j = 0; j < f.dim(); ++j) cep[j] = f.mel_cepstra(t, j);
    idct2_ortho(cep.data(), static_cast<int>(f.dim()), target_log_bands.data(), kMelBands);
    auto env = mel_cepstrum_to_envelope(f.mel_cepstra.row(t), static_cast<int>(f.dim()), n_fft,
                                        sample_rate);

    const float* chunk = excitation.data() + t * hop;
    for (int i = 0; i < frame; ++i) wbuf[i] = static_cast<float>(chunk[i] * window[i]);
    auto spec = rfft(wbuf.data(), frame, static_cast<size_t>(n_fft));

    for (size_t k = 0; k < bins; ++k) gain[k] = env[k];
    constexpr int kGainPasses = 3;
    for (int pass = 0; pass < kGainPasses; ++pass) {
      for (size_t k = 0; k < bins; ++k)
        shaped_mag[k] = static_cast<float>(gain[k] * std::abs(spec[k]));
      auto achieved = fb.apply(shaped_mag.data());
      for (int b = 0; b < kMelBands; ++b)
        log_ratio[b] = std::min(
            target_log_bands[b] - std::log(std::max(achieved[b], 1e-30)), 50.0);
      auto corr = detail::interp_bands_to_bins(log_ratio, fb.centers_hz(),
                                               static_cast<int>(bins), bin_hz);
      for (size_t k = 0; k < bins; ++k)
        gain[k] = std::min(gain[k] * std::exp(corr[k]), 1e12);
    }

    for (size_t k = 0; k < bins; ++k) half[k] = spec[k] * gain[k];
    auto frame_sig = irfft_half_spectrum(half, static_cast<size_t>(n_fft));
    const size_t off = t * hop;
    for (int i = 0; i < frame; ++i) {
      acc[off + i] += window[i] * frame_sig[i];
      norm[off + i] += window[i] * window[i];
    }
  }

  // The normalizer floor matters at the utterance edges: filtering spreads
  // energy past the window support, so an unfloored 1/sum(w^2) would blow up
  // the outermost samples. Flooring tapers them to zero instead.
  out.samples.resize(out_len);
  double peak = 0.0;
  for (size_t i = 0; i < out_len; ++i) {
    const double v = acc[i] / std::max(norm[i], 1e-2);
    out.samples[i] = static_cast<float>(v);
    peak = std::max(peak, std::fabs(v));
  }
  if (peak > 0.0) {
    const float gain_out = static_cast<float>(kSynthesisPeak / peak);
    for (auto& s : out.samples) s *= gain_out;
  }
  return out;
}

}  // namespace vcforge::dsp
