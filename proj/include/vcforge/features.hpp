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

// Utterance-level feature extraction (mel-cepstra + F0 track), per-coefficient
// normalization statistics, and the binary feature-cache format.

#include <cmath>
#include <span>
#include <string>
#include <vector>

#include "vcforge/errors.hpp"
#include "vcforge/f0.hpp"
#include "vcforge/io.hpp"
#include "vcforge/matrix.hpp"
#include "vcforge/mel.hpp"
#include "vcforge/stft.hpp"
#include "vcforge/wav.hpp"

namespace vcforge::dsp {

struct FeatureConfig {
  double frame_len_ms = 25.0;
  double hop_ms = 10.0;
  int sample_rate = kTargetSampleRate;
  int n_coeffs = kCepstralOrder;

  int frame_samples() const { return ms_to_samples(frame_len_ms, sample_rate); }
  int n_fft() const { return static_cast<int>(next_power_of_two(frame_samples())); }
};

struct FeatureSequence {
  Mat<float> mel_cepstra;  // T x n_coeffs
  std::vector<float> f0;   // Hz; 0 marks unvoiced frames
  double frame_hop_ms = 10.0;
  double frame_len_ms = 25.0;

  size_t frames() const { return mel_cepstra.rows; }
  size_t dim() const { return mel_cepstra.cols; }
  bool voiced(size_t t) const { return f0[t] > 0.0f; }
};

inline void validate_feature_sequence(const FeatureSequence& f, const std::string& what) {
  require(f.f0.size() == f.frames(), what + ": f0 length does not match frame count");
  require(f.frame_hop_ms > 0 && f.frame_len_ms > 0, what + ": nonpositive framing");
  for (float v : f.f0)
    require(v == 0.0f || (v >= kF0Min - 1e-3 && v <= kF0Max + 1e-3),
            what + ": f0 value " + std::to_string(v) + " outside 0 or [50,500] Hz");
}

inline FeatureSequence analyze(const Waveform& w, const FeatureConfig& cfg = {}) {
  require(w.sample_rate == cfg.sample_rate,
          "analyze: waveform rate " + std::to_string(w.sample_rate) + " != configured " +
              std::to_string(cfg.sample_rate));
  auto spec = stft(w, cfg.frame_len_ms, cfg.hop_ms, cfg.n_fft());
  FeatureSequence f;
  f.mel_cepstra = mel_cepstral_analysis(spec, cfg.n_coeffs);
  f.f0 = estimate_f0(w, cfg.frame_len_ms, cfg.hop_ms);
  f.frame_hop_ms = cfg.hop_ms;
  f.frame_len_ms = cfg.frame_len_ms;
  require(f.f0.size() == f.frames(), "analyze: internal framing mismatch");
  return f;
}

// ---------------------------------------------------------------------------
// Normalization statistics

struct NormStats {
  std::vector<float> mean;  // per coefficient
  std::vector<float> std;   // per coefficient, floored at 1e-8
};

inline constexpr float kStdFloor = 1e-8f;

inline NormStats compute_norm_stats(std::span<const FeatureSequence> corpus) {
  require(!corpus.empty(), "compute_norm_stats: empty corpus");
  const size_t dim = corpus.front().dim();
  std::vector<double> sum(dim, 0.0), sum_sq(dim, 0.0);
  size_t n = 0;
  for (const auto& f : corpus) {
    require(f.dim() == dim, "compute_norm_stats: inconsistent feature dimension");
    for (size_t t = 0; t < f.frames(); ++t) {
      const float* row = f.mel_cepstra.row(t);
      for (size_t j = 0; j < dim; ++j) {
        sum[j] += row[j];
        sum_sq[j] += static_cast<double>(row[j]) * row[j];
      }
      ++n;
    }
  }
  require(n > 0, "compute_norm_stats: corpus has no frames");
  NormStats s;
  s.mean.resize(dim);
  s.std.resize(dim);
  for (size_t j = 0; j < dim; ++j) {
    const double m = sum[j] / static_cast<double>(n);
    const double var = std::max(sum_sq[j] / static_cast<double>(n) - m * m, 0.0);
    s.mean[j] = static_cast<float>(m);
    s.std[j] = std::max(static_cast<float>(std::sqrt(var)), kStdFloor);
  }
  return s;
}

inline FeatureSequence apply_norm(const FeatureSequence& f, const NormStats& s) {
  require(f.dim() == s.mean.size(), "apply_norm: dimension mismatch");
  FeatureSequence out = f;
  for (size_t t = 0; t < out.frames(); ++t) {
    float* row = out.mel_cepstra.row(t);
    for (size_t j = 0; j < out.dim(); ++j) row[j] = (row[j] - s.mean[j]) / s.std[j];
  }
  return out;
}

inline FeatureSequence invert_norm(const FeatureSequence& f, const NormStats& s) {
  require(f.dim() == s.mean.size(), "invert_norm: dimension mismatch");
  FeatureSequence out = f;
  for (size_t t = 0; t < out.frames(); ++t) {
    float* row = out.mel_cepstra.row(t);
    for (size_t j = 0; j < out.dim(); ++j) row[j] = row[j] * s.std[j] + s.mean[j];
  }
  return out;
}

// ---------------------------------------------------------------------------
// Feature cache file: "VCF1" | u32 T | u32 dim | T*dim f32 | T f32 (f0),
// all little-endian.

inline constexpr char kFeatureCacheMagic[4] = {'V', 'C', 'F', '1'};

inline void save_feature_cache(const std::string& path, const FeatureSequence& f) {
  auto os = io::open_out(path);
  io::write_bytes(os, kFeatureCacheMagic, 4);
  io::write_u32(os, static_cast<uint32_t>(f.frames()));
  io::write_u32(os, static_cast<uint32_t>(f.dim()));
  for (float v : f.mel_cepstra.v) io::write_f32(os, v);
  for (float v : f.f0) io::write_f32(os, v);
  require(static_cast<bool>(os), "feature cache write failed: " + path);
}

inline FeatureSequence load_feature_cache(const std::string& path, double frame_len_ms,
                                          double hop_ms) {
  auto is = io::open_in(path);
  char magic[4];
  io::read_bytes(is, magic, 4, path + " (magic)");
  require(std::string(magic, 4) == std::string(kFeatureCacheMagic, 4),
          path + ": not a feature cache file (bad magic)");
  const uint32_t t = io::read_u32(is, path + " (frame count)");
  const uint32_t dim = io::read_u32(is, path + " (dimension)");
  FeatureSequence f;
  f.frame_len_ms = frame_len_ms;
  f.frame_hop_ms = hop_ms;
  f.mel_cepstra = Mat<float>(t, dim);
  for (auto& v : f.mel_cepstra.v) v = io::read_f32(is, path + " (coefficients)");
  f.f0.resize(t);
  for (auto& v : f.f0) v = io::read_f32(is, path + " (f0)");
  validate_feature_sequence(f, path);
  return f;
}

}  // namespace vcforge::dsp
