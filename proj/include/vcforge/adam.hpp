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
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "vcforge/errors.hpp"
#include "vcforge/tensor.hpp"

namespace vcforge::nn {

struct NamedTensor {
  std::string name;
  Tensor tensor;
};

/// Per-parameter first/second moment estimates plus the shared step counter
/// and hyperparameters.
struct AdamState {
  std::vector<std::vector<float>> first_moment;
  std::vector<std::vector<float>> second_moment;
  int64_t step_count = 0;
  float learning_rate = 1e-3f;
  float beta1 = 0.9f;
  float beta2 = 0.999f;
  float epsilon = 1e-8f;
};

/// Adam with bias correction over a fixed parameter list.
class AdamOptimizer {
 public:
  AdamOptimizer(std::vector<NamedTensor> params, float learning_rate, float beta1 = 0.9f,
                float beta2 = 0.999f, float epsilon = 1e-8f)
      : params_(std::move(params)) {
    require(learning_rate > 0.0f, "adam: learning rate must be positive");
    require(beta1 > 0.0f && beta1 < 1.0f && beta2 > 0.0f && beta2 < 1.0f,
            "adam: betas must lie in (0,1)");
    require(epsilon > 0.0f, "adam: epsilon must be positive");
    state_.learning_rate = learning_rate;
    state_.beta1 = beta1;
    state_.beta2 = beta2;
    state_.epsilon = epsilon;
    for (const auto& p : params_) {
      state_.first_moment.emplace_back(p.tensor.numel(), 0.0f);
      state_.second_moment.emplace_back(p.tensor.numel(), 0.0f);
    }
  }

  void zero_grad() {
    for (auto& p : params_) p.tensor.zero_grad();
  }

  void step() {
    ++state_.step_count;
    const float b1 = state_.beta1, b2 = state_.beta2;
    const float bc1 = 1.0f - std::pow(b1, static_cast<float>(state_.step_count));
    const float bc2 = 1.0f - std::pow(b2, static_cast<float>(state_.step_count));
    for (size_t pi = 0; pi < params_.size(); ++pi) {
      auto& p = params_[pi];
      require(p.tensor.has_grad(), "adam: no gradient for parameter '" + p.name + "'");
      auto& theta = p.tensor.data();
      const auto& g = p.tensor.grad();
      auto& m = state_.first_moment[pi];
      auto& v = state_.second_moment[pi];
      for (size_t i = 0; i < theta.size(); ++i) {
        m[i] = b1 * m[i] + (1.0f - b1) * g[i];
        v[i] = b2 * v[i] + (1.0f - b2) * g[i] * g[i];
        const float mhat = m[i] / bc1;
        const float vhat = v[i] / bc2;
        theta[i] -= state_.learning_rate * mhat / (std::sqrt(vhat) + state_.epsilon);
      }
    }
  }

  const AdamState& state() const { return state_; }
  const std::vector<NamedTensor>& params() const { return params_; }

 private:
  std::vector<NamedTensor> params_;
  AdamState state_;
};

}  // namespace vcforge::nn
