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

#include "autodiff_checks.hpp"
#include "reference_ops.hpp"
#include "vcforge/tensor.hpp"

using namespace vcforge;
using nn::Tensor;

TEST_CASE("backward on x^2 at x=3 gives 6 and accumulates on repeat") {
  auto x = Tensor::from_data({1}, {3.0f}, true);
  auto loss = nn::square(x);
  nn::backward(loss);
  CHECK(x.grad()[0] == Catch::Approx(6.0f));
  nn::backward(loss);
  CHECK(x.grad()[0] == Catch::Approx(12.0f));
  x.zero_grad();
  nn::backward(loss);
  CHECK(x.grad()[0] == Catch::Approx(6.0f));
}

TEST_CASE("backward requires a scalar loss") {
  auto x = Tensor::zeros({2, 2}, true);
  CHECK_THROWS_AS(nn::backward(nn::square(x)), Error);
}

TEST_CASE("gradient of sum(sigmoid(w*x)) matches finite differences") {
  SplitMix64 rng(93);
  const int n = 8;
  refops::Vec wd = gradcheck::rand_vec(rng, n), xd = gradcheck::rand_vec(rng, n);
  std::vector<float> wf(n), xf(n);
  for (int i = 0; i < n; ++i) {
    wf[i] = static_cast<float>(wd[i]);
    xf[i] = static_cast<float>(xd[i]);
  }
  auto w = Tensor::from_data({n}, wf, true);
  auto x = Tensor::from_data({n}, xf, true);
  auto loss = nn::sum(nn::sigmoid(nn::mul(w, x)));
  nn::backward(loss);

  auto ref = [&] { return refops::sum(refops::sigmoid(refops::mul(wd, xd))); };
  for (int i = 0; i < n; ++i) {
    const double fd_w = refops::central_diff(ref, wd, i);
    const double fd_x = refops::central_diff(ref, xd, i);
    CHECK(w.grad()[i] == Catch::Approx(fd_w).epsilon(1e-3).margin(1e-5));
    CHECK(x.grad()[i] == Catch::Approx(fd_x).epsilon(1e-3).margin(1e-5));
  }
}

TEST_CASE("parameter detached from the loss keeps a zero gradient") {
  auto used = Tensor::from_data({1}, {2.0f}, true);
  auto unused = Tensor::from_data({1}, {5.0f}, true);
  auto loss = nn::square(used);
  nn::backward(loss);
  CHECK(used.grad()[0] == Catch::Approx(4.0f));
  CHECK(unused.grad()[0] == 0.0f);
}

TEST_CASE("backward is linear in the loss") {
  SplitMix64 rng(17);
  const int n = 6;
  auto make_params = [&](SplitMix64 r) {
    auto x = Tensor::zeros({n}, true);
    for (auto& v : x.data()) v = r.uniform_float(-1.0f, 1.0f);
    return x;
  };

  // grad(a*L1 + b*L2) computed in one pass...
  auto x = make_params(SplitMix64(17));
  const float a = 0.7f, b = -1.3f;
  auto l1 = nn::mean(nn::square(x));
  auto l2 = nn::sum(nn::sigmoid(x));
  auto combined = nn::add(nn::mul_scalar(l1, a), nn::mul_scalar(l2, b));
  nn::backward(combined);
  const auto g_combined = x.grad();

  // ...must equal a*grad(L1) + b*grad(L2) computed separately.
  auto y = make_params(SplitMix64(17));
  auto m1 = nn::mean(nn::square(y));
  nn::backward(m1);
  const auto g1 = y.grad();
  y.zero_grad();
  auto m2 = nn::sum(nn::sigmoid(y));
  nn::backward(m2);
  const auto g2 = y.grad();

  for (int i = 0; i < n; ++i)
    CHECK(g_combined[i] == Catch::Approx(a * g1[i] + b * g2[i]).margin(1e-6));
}

TEST_CASE("every differentiable op matches central finite differences") {
  auto res = gradcheck::check_all_ops(2024);
  INFO("worst: " << res.worst << " rel err " << res.max_rel_err);
  CHECK(res.ok);
  CHECK(res.checked > 300);
}

TEST_CASE("composite graphs match central finite differences") {
  auto res = gradcheck::check_composite_graphs(4096);
  INFO("worst: " << res.worst << " rel err " << res.max_rel_err);
  CHECK(res.ok);
}

TEST_CASE("diamond-shaped graph accumulates both paths") {
  // loss = x*x + x  ->  dloss/dx = 2x + 1
  auto x = Tensor::from_data({1}, {1.5f}, true);
  auto loss = nn::add(nn::mul(x, x), x);
  nn::backward(loss);
  CHECK(x.grad()[0] == Catch::Approx(4.0f));
}
