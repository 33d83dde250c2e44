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

// RIFF/WAVE I/O restricted to 16-bit signed little-endian PCM, mono.
// Loading resamples to 16 kHz when the file rate differs.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "vcforge/errors.hpp"
#include "vcforge/io.hpp"

namespace vcforge::dsp {

inline constexpr int kTargetSampleRate = 16000;

struct Waveform {
  std::vector<float> samples;  // in [-1, 1]
  int sample_rate = kTargetSampleRate;

  double duration_seconds() const {
    return sample_rate > 0 ? static_cast<double>(samples.size()) / sample_rate : 0.0;
  }
};

/// Linear-interpolation resampler. Output length is floor((n-1)*ratio) + 1,
/// sampling the input at i/ratio.
inline Waveform resample_linear(const Waveform& w, int target_rate) {
  require(target_rate > 0, "resample: target rate must be positive");
  if (w.sample_rate == target_rate || w.samples.empty()) {
    Waveform out = w;
    out.sample_rate = target_rate;
    return out;
  }
  const double ratio = static_cast<double>(target_rate) / w.sample_rate;
  const size_t out_len = static_cast<size_t>(std::floor((w.samples.size() - 1) * ratio)) + 1;
  Waveform out;
  out.sample_rate = target_rate;
  out.samples.resize(out_len);
  for (size_t i = 0; i < out_len; ++i) {
    const double pos = static_cast<double>(i) / ratio;
    const size_t i0 = static_cast<size_t>(pos);
    const size_t i1 = std::min(i0 + 1, w.samples.size() - 1);
    const double frac = pos - static_cast<double>(i0);
    out.samples[i] = static_cast<float>((1.0 - frac) * w.samples[i0] + frac * w.samples[i1]);
  }
  return out;
}

inline Waveform load_wav(const std::string& path) {
  auto is = io::open_in(path);

  char riff[4];
  io::read_bytes(is, riff, 4, path + " (RIFF tag)");
  require(std::string(riff, 4) == "RIFF", path + ": not a RIFF file");
  io::read_u32(is, path + " (RIFF size)");
  char wave[4];
  io::read_bytes(is, wave, 4, path + " (WAVE tag)");
  require(std::string(wave, 4) == "WAVE", path + ": not a WAVE file");

  uint16_t audio_format = 0, channels = 0, bits = 0;
  uint32_t rate = 0;
  bool have_fmt = false;
  std::vector<int16_t> pcm;
  bool have_data = false;

  // Walk chunks; unknown ones are skipped (padded to even size).
  while (is.peek() != EOF) {
    char id[4];
    is.read(id, 4);
    if (is.gcount() == 0) break;
    require(is.gcount() == 4, path + ": truncated chunk header");
    const uint32_t size = io::read_u32(is, path + " (chunk size)");
    const std::string tag(id, 4);
    if (tag == "fmt ") {
      require(size >= 16, path + ": fmt chunk too small");
      audio_format = static_cast<uint16_t>(io::read_i16(is, path));
      channels = static_cast<uint16_t>(io::read_i16(is, path));
      rate = io::read_u32(is, path);
      io::read_u32(is, path);  // byte rate
      io::read_i16(is, path);  // block align
      bits = static_cast<uint16_t>(io::read_i16(is, path));
      if (size > 16) is.seekg(size - 16 + (size % 2), std::ios::cur);
      have_fmt = true;
    } else if (tag == "data") {
      require(have_fmt, path + ": data chunk before fmt chunk");
      require(audio_format == 1, path + ": unsupported WAV encoding (only PCM is supported)");
      require(channels == 1, path + ": unsupported channel count " + std::to_string(channels) +
                                 " (only mono is supported)");
      require(bits == 16, path + ": unsupported bit depth " + std::to_string(bits) +
                              " (only 16-bit is supported)");
      const size_t n = size / 2;
      pcm.resize(n);
      for (size_t i = 0; i < n; ++i) pcm[i] = io::read_i16(is, path + " (samples)");
      have_data = true;
    } else {
      is.seekg(size + (size % 2), std::ios::cur);
      require(static_cast<bool>(is), path + ": truncated while skipping chunk '" + tag + "'");
    }
  }
  require(have_fmt && have_data, path + ": missing fmt or data chunk");
  require(rate > 0, path + ": invalid sample rate 0");

  Waveform w;
  w.sample_rate = static_cast<int>(rate);
  w.samples.resize(pcm.size());
  for (size_t i = 0; i < pcm.size(); ++i) w.samples[i] = static_cast<float>(pcm[i]) / 32768.0f;
  if (w.sample_rate != kTargetSampleRate) w = resample_linear(w, kTargetSampleRate);
  return w;
}

inline void save_wav(const std::string& path, const Waveform& w) {
  require(w.sample_rate > 0, "save_wav: sample rate must be positive");
  auto os = io::open_out(path);
  const uint32_t data_bytes = static_cast<uint32_t>(w.samples.size() * 2);
  io::write_bytes(os, "RIFF", 4);
  io::write_u32(os, 36 + data_bytes);
  io::write_bytes(os, "WAVE", 4);
  io::write_bytes(os, "fmt ", 4);
  io::write_u32(os, 16);
  io::write_i16(os, 1);  // PCM
  io::write_i16(os, 1);  // mono
  io::write_u32(os, static_cast<uint32_t>(w.sample_rate));
  io::write_u32(os, static_cast<uint32_t>(w.sample_rate) * 2);
  io::write_i16(os, 2);   // block align
  io::write_i16(os, 16);  // bits per sample
  io::write_bytes(os, "data", 4);
  io::write_u32(os, data_bytes);
  for (float s : w.samples) {
    const float c = std::clamp(s, -1.0f, 1.0f);
    const long q = std::lround(static_cast<double>(c) * 32768.0);
    io::write_i16(os, static_cast<int16_t>(std::clamp(q, -32768L, 32767L)));
  }
  require(static_cast<bool>(os), "save_wav: write failed: " + path);
}

}  // namespace vcforge::dsp
