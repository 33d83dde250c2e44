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
#include <catch_amalgamated.hpp>

#include <cmath>

#include "test_util.hpp"
#include "vcforge/f0.hpp"
#include "vcforge/features.hpp"
#include "vcforge/vocoder.hpp"

using namespace vcforge;
using namespace vcforge::dsp;

TEST_CASE("f0: 100 Hz pulse train within 2 Hz on interior frames") {
  auto w = testutil::pulse_train(100.0, 1.0);
  auto f0 = estimate_f0(w, 25.0, 10.0);
  REQUIRE(f0.size() > 20);
  for (size_t t = 5; t + 5 < f0.size(); ++t) {
    REQUIRE(f0[t] > 0.0f);
    CHECK(f0[t] == Catch::Approx(100.0).margin(2.0));
  }
}

TEST_CASE("f0: 220 Hz sine within 3 Hz") {
  auto w = testutil::sine(220.0, 1.0);
  auto f0 = estimate_f0(w, 25.0, 10.0);
  for (size_t t = 5; t + 5 < f0.size(); ++t) {
    REQUIRE(f0[t] > 0.0f);
    CHECK(f0[t] == Catch::Approx(220.0).margin(3.0));
  }
}

TEST_CASE("f0: digital silence is unvoiced everywhere") {
  Waveform w;
  w.samples.assign(16000, 0.0f);
  auto f0 = estimate_f0(w, 25.0, 10.0);
  for (float v : f0) CHECK(v == 0.0f);
}

TEST_CASE("f0: doubling the pulse rate doubles the estimate within 5%") {
  for (double base : {90.0, 120.0, 160.0}) {
    auto lo = estimate_f0(testutil::pulse_train(base, 0.8), 25.0, 10.0);
    auto hi = estimate_f0(testutil::pulse_train(2.0 * base, 0.8), 25.0, 10.0);
    double lo_mean = 0.0, hi_mean = 0.0;
    size_t nl = 0, nh = 0;
    for (size_t t = 5; t + 5 < lo.size(); ++t)
      if (lo[t] > 0) {
        lo_mean += lo[t];
        ++nl;
      }
    for (size_t t = 5; t + 5 < hi.size(); ++t)
      if (hi[t] > 0) {
        hi_mean += hi[t];
        ++nh;
      }
    REQUIRE(nl > 0);
    REQUIRE(nh > 0);
    lo_mean /= static_cast<double>(nl);
    hi_mean /= static_cast<double>(nh);
    CHECK(hi_mean / lo_mean == Catch::Approx(2.0).epsilon(0.05));
  }
}

TEST_CASE("vocoder round trip keeps LSD at or under 3 dB on vowels") {
  const double cases[][3] = {
      {110.0, 600.0, 1900.0}, {150.0, 400.0, 2200.0}, {180.0, 700.0, 1500.0}};
  for (const auto& c : cases) {
    auto w = testutil::vowel(c[0], c[1], c[2], 0.8);
    auto f = analyze(w);
    auto synth = synthesize(f);
    const double lsd = testutil::lsd_voiced_db(w, synth);
    INFO("f0 " << c[0] << " F1 " << c[1] << " F2 " << c[2] << " -> LSD " << lsd << " dB");
    CHECK(lsd <= 3.0);
  }
}

TEST_CASE("all-unvoiced features synthesize noise-like output") {
  FeatureSequence f;
  f.mel_cepstra = Mat<float>(60, 24, 0.0f);  // flat unit envelope
  f.f0.assign(60, 0.0f);
  auto w = synthesize(f);
  REQUIRE(!w.samples.empty());
  CHECK(testutil::zero_crossing_rate(w) > 0.2);
}

TEST_CASE("empty features synthesize an empty waveform") {
  FeatureSequence f;
  f.mel_cepstra = Mat<float>(0, 24);
  auto w = synthesize(f);
  CHECK(w.samples.empty());
}

TEST_CASE("synthesis is deterministic and peak-normalized") {
  auto w = testutil::vowel(130.0, 500.0, 2100.0, 0.5);
  auto f = analyze(w);
  auto a = synthesize(f);
  auto b = synthesize(f);
  CHECK(a.samples == b.samples);
  float peak = 0.0f;
  for (float v : a.samples) peak = std::max(peak, std::fabs(v));
  CHECK(peak == Catch::Approx(0.9f).margin(1e-4));
}
