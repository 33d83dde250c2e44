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
#include <vector>

#include "reference_ops.hpp"
#include "vcforge/adam.hpp"
#include "vcforge/rng.hpp"
#include "vcforge/tensor.hpp"

using namespace vcforge;
using nn::Tensor;

namespace {

Tensor tvec(std::vector<float> v, bool rg = false) {
  const int n = static_cast<int>(v.size());
  return Tensor::from_data({n}, std::move(v), rg);
}

}  // namespace

TEST_CASE("elementwise basic values") {
  auto a = tvec({1.0f, 2.0f});
  auto zero = tvec({0.0f, 0.0f});
  auto add = nn::elementwise(nn::EwOp::kAdd, a, zero);
  CHECK(add.data() == std::vector<float>{1.0f, 2.0f});

  auto sig = nn::elementwise(nn::EwOp::kSigmoid, tvec({0.0f}));
  CHECK(sig.data()[0] == Catch::Approx(0.5).margin(1e-7));

  auto m = nn::elementwise(nn::EwOp::kMul, tvec({2.0f, 3.0f}), tvec({4.0f, 5.0f}));
  CHECK(m.data()[0] == Catch::Approx(8.0f));
  CHECK(m.data()[1] == Catch::Approx(15.0f));
}

TEST_CASE("elementwise shape mismatch names both shapes") {
  auto a = Tensor::zeros({2, 3});
  auto b = Tensor::zeros({3, 2});
  try {
    nn::add(a, b);
    FAIL("expected an error");
  } catch (const Error& e) {
    const std::string msg = e.what();
    CHECK(msg.find("[2,3]") != std::string::npos);
    CHECK(msg.find("[3,2]") != std::string::npos);
  }
}

TEST_CASE("elementwise matches double reference on random inputs") {
  SplitMix64 rng(11);
  for (int it = 0; it < 20; ++it) {
    const int n = 1 + static_cast<int>(rng.next_below(32));
    std::vector<float> af(n), bf(n);
    refops::Vec ad(n), bd(n);
    for (int i = 0; i < n; ++i) {
      ad[i] = rng.uniform(-2.0, 2.0);
      bd[i] = rng.uniform(-2.0, 2.0);
      af[i] = static_cast<float>(ad[i]);
      bf[i] = static_cast<float>(bd[i]);
    }
    auto a = tvec(af), b = tvec(bf);
    struct Case {
      nn::Tensor got;
      refops::Vec want;
    };
    const Case cases[] = {
        {nn::add(a, b), refops::add(ad, bd)},     {nn::sub(a, b), refops::sub(ad, bd)},
        {nn::mul(a, b), refops::mul(ad, bd)},     {nn::sigmoid(a), refops::sigmoid(ad)},
        {nn::tanh_op(a), refops::tanh_v(ad)},     {nn::square(a), refops::square(ad)},
        {nn::abs_op(a), refops::abs_v(ad)},
    };
    for (const auto& c : cases)
      for (int i = 0; i < n; ++i)
        CHECK(c.got.data()[i] == Catch::Approx(c.want[i]).margin(1e-5));
  }
}

TEST_CASE("matmul identity and hand values") {
  auto eye = Tensor::from_data({2, 2}, {1, 0, 0, 1});
  auto col = Tensor::from_data({2, 1}, {5, 6});
  auto r = nn::matmul(eye, col);
  CHECK(r.shape() == nn::Shape{2, 1});
  CHECK(r.data() == std::vector<float>{5.0f, 6.0f});

  // Expected values from the naive triple-loop reference.
  auto a = Tensor::from_data({2, 2}, {1, 2, 3, 4});
  auto want = refops::matmul({1, 2, 3, 4}, {5, 6}, 2, 2, 1);
  auto got = nn::matmul(a, col);
  CHECK(got.data()[0] == Catch::Approx(want[0]));  // 17
  CHECK(got.data()[1] == Catch::Approx(want[1]));  // 39
  CHECK(got.data()[0] == 17.0f);
  CHECK(got.data()[1] == 39.0f);

  auto z = nn::matmul(Tensor::zeros({2, 3}), Tensor::filled({3, 4}, 7.0f));
  CHECK(z.shape() == nn::Shape{2, 4});
  for (float v : z.data()) CHECK(v == 0.0f);

  CHECK_THROWS_AS(nn::matmul(Tensor::zeros({2, 3}), Tensor::zeros({2, 3})), Error);
}

TEST_CASE("conv1d identity kernel, hand case, stride arithmetic") {
  auto x = Tensor::from_data({1, 3}, {1, 2, 3});
  auto ident = Tensor::from_data({1, 1, 1}, {1.0f});
  auto y = nn::conv1d(x, ident, 1, 0);
  CHECK(y.data() == std::vector<float>{1, 2, 3});

  auto x4 = Tensor::from_data({1, 4}, {1, 2, 3, 4});
  auto edge = Tensor::from_data({1, 1, 3}, {1, 0, -1});
  auto want = refops::conv1d({1, 2, 3, 4}, {1, 0, -1}, 1, 4, 1, 3, 1, 0);
  auto got = nn::conv1d(x4, edge, 1, 0);
  REQUIRE(got.shape() == nn::Shape{1, 2});
  CHECK(got.data()[0] == Catch::Approx(want[0]));  // -2
  CHECK(got.data()[1] == Catch::Approx(want[1]));  // -2

  auto strided = nn::conv1d(x4, Tensor::from_data({1, 1, 2}, {1, 1}), 2, 0);
  CHECK(strided.shape() == nn::Shape{1, 2});

  CHECK_THROWS_AS(nn::conv1d(Tensor::zeros({1, 2}), Tensor::zeros({1, 1, 5}), 1, 0), Error);
}

TEST_CASE("conv1d identity kernel is identity for random inputs") {
  SplitMix64 rng(23);
  for (int it = 0; it < 10; ++it) {
    const int c = 1 + static_cast<int>(rng.next_below(4));
    const int t = 1 + static_cast<int>(rng.next_below(16));
    auto x = Tensor::zeros({c, t});
    for (auto& v : x.data()) v = rng.uniform_float(-3.0f, 3.0f);
    // Identity: kernels[o][i][0] = (o == i)
    auto k = Tensor::zeros({c, c, 1});
    for (int i = 0; i < c; ++i) k.data()[static_cast<size_t>(i) * c + i] = 1.0f;
    auto y = nn::conv1d(x, k, 1, 0);
    REQUIRE(y.shape() == x.shape());
    for (size_t i = 0; i < x.data().size(); ++i) CHECK(y.data()[i] == x.data()[i]);
  }
}

TEST_CASE("conv1d matches direct summation on random shapes") {
  SplitMix64 rng(37);
  for (int it = 0; it < 25; ++it) {
    const int c_in = 1 + static_cast<int>(rng.next_below(3));
    const int c_out = 1 + static_cast<int>(rng.next_below(3));
    const int t = 3 + static_cast<int>(rng.next_below(12));
    const int kw = 1 + static_cast<int>(rng.next_below(4));
    const int stride = 1 + static_cast<int>(rng.next_below(2));
    const int pad = static_cast<int>(rng.next_below(3));
    if (kw > t + 2 * pad) continue;
    refops::Vec xd(static_cast<size_t>(c_in) * t), wd(static_cast<size_t>(c_out) * c_in * kw);
    std::vector<float> xf(xd.size()), wf(wd.size());
    for (size_t i = 0; i < xd.size(); ++i) xf[i] = static_cast<float>(xd[i] = rng.uniform(-1, 1));
    for (size_t i = 0; i < wd.size(); ++i) wf[i] = static_cast<float>(wd[i] = rng.uniform(-1, 1));
    auto got = nn::conv1d(Tensor::from_data({c_in, t}, xf),
                          Tensor::from_data({c_out, c_in, kw}, wf), stride, pad);
    auto want = refops::conv1d(xd, wd, c_in, t, c_out, kw, stride, pad);
    REQUIRE(got.data().size() == want.size());
    for (size_t i = 0; i < want.size(); ++i)
      CHECK(got.data()[i] == Catch::Approx(want[i]).margin(1e-4));
  }
}

TEST_CASE("glu gating behavior") {
  // Zero gate input halves A.
  auto x = Tensor::from_data({2, 2}, {1, 2, 0, 0});
  auto y = nn::glu(x);
  REQUIRE(y.shape() == nn::Shape{1, 2});
  CHECK(y.data()[0] == Catch::Approx(0.5f));
  CHECK(y.data()[1] == Catch::Approx(1.0f));

  // Saturated gate passes A through.
  auto sat = nn::glu(Tensor::from_data({2, 2}, {1, 2, 100, 100}));
  CHECK(sat.data()[0] == Catch::Approx(1.0f).margin(1e-6));
  CHECK(sat.data()[1] == Catch::Approx(2.0f).margin(1e-6));

  // sigmoid(ln 3) = 3/4 in closed form.
  auto ln3 = nn::glu(Tensor::from_data({2, 1}, {2.0f, std::log(3.0f)}));
  CHECK(ln3.data()[0] == Catch::Approx(1.5f).margin(1e-6));

  CHECK_THROWS_AS(nn::glu(Tensor::zeros({3, 2})), Error);
}

TEST_CASE("instance_norm closed-form cases") {
  auto gain = Tensor::filled({1}, 1.0f);
  auto bias = Tensor::filled({1}, 0.0f);

  auto constant = nn::instance_norm(Tensor::filled({1, 4}, 3.0f), gain, bias, 1e-5f);
  for (float v : constant.data()) CHECK(v == Catch::Approx(0.0f).margin(1e-6));

  auto two = nn::instance_norm(Tensor::from_data({1, 2}, {1, 3}), gain, bias, 1e-5f);
  CHECK(two.data()[0] == Catch::Approx(-1.0f).margin(1e-3));
  CHECK(two.data()[1] == Catch::Approx(1.0f).margin(1e-3));

  auto zero_gain = nn::instance_norm(Tensor::from_data({1, 3}, {5, -2, 9}),
                                     Tensor::filled({1}, 0.0f), Tensor::filled({1}, 7.0f));
  for (float v : zero_gain.data()) CHECK(v == Catch::Approx(7.0f));
}

TEST_CASE("instance_norm matches double reference") {
  SplitMix64 rng(71);
  for (int it = 0; it < 10; ++it) {
    const int c = 1 + static_cast<int>(rng.next_below(3));
    const int t = 2 + static_cast<int>(rng.next_below(10));
    refops::Vec xd(static_cast<size_t>(c) * t), gd(c), bd(c);
    std::vector<float> xf(xd.size()), gf(c), bf(c);
    for (size_t i = 0; i < xd.size(); ++i) xf[i] = static_cast<float>(xd[i] = rng.uniform(-2, 2));
    for (int i = 0; i < c; ++i) {
      gf[i] = static_cast<float>(gd[i] = rng.uniform(0.5, 1.5));
      bf[i] = static_cast<float>(bd[i] = rng.uniform(-1, 1));
    }
    auto got = nn::instance_norm(Tensor::from_data({c, t}, xf), Tensor::from_data({c}, gf),
                                 Tensor::from_data({c}, bf), 1e-5f);
    auto want = refops::instance_norm(xd, gd, bd, c, t, 1e-5);
    for (size_t i = 0; i < want.size(); ++i)
      CHECK(got.data()[i] == Catch::Approx(want[i]).margin(1e-4));
  }
}

TEST_CASE("adam first step and zero-gradient fixed point") {
  SECTION("first step magnitude equals the learning rate") {
    auto theta = Tensor::zeros({1}, true);
    theta.zero_grad();
    auto loss = nn::mul(theta, Tensor::filled({1}, 1.0f));  // d loss / d theta = 1
    nn::backward(loss);
    nn::AdamOptimizer opt({{"theta", theta}}, 0.0002f);
    opt.step();
    CHECK(theta.data()[0] == Catch::Approx(-0.0002).margin(1e-6));
    CHECK(opt.state().step_count == 1);
  }

  SECTION("zero gradients never move parameters") {
    SplitMix64 rng(5);
    auto theta = Tensor::uniform({4, 3}, 1.0f, rng, true);
    const auto before = theta.data();
    nn::AdamOptimizer opt({{"theta", theta}}, 0.01f);
    for (int i = 0; i < 7; ++i) {
      auto zero = nn::mul_scalar(nn::sum(nn::mul_scalar(theta, 0.0f)), 0.0f);
      opt.zero_grad();
      nn::backward(zero);
      opt.step();
    }
    CHECK(theta.data() == before);
    CHECK(opt.state().step_count == 7);
  }

  SECTION("missing gradient is reported with the parameter name") {
    auto theta = Tensor::zeros({2}, true);
    nn::AdamOptimizer opt({{"conv.weight", theta}}, 0.001f);
    try {
      opt.step();
      FAIL("expected an error");
    } catch (const Error& e) {
      CHECK(std::string(e.what()).find("conv.weight") != std::string::npos);
    }
  }
}

TEST_CASE("upsample_nearest_x2 duplicates columns") {
  auto x = Tensor::from_data({2, 2}, {1, 2, 3, 4});
  auto y = nn::upsample_nearest_x2(x);
  REQUIRE(y.shape() == nn::Shape{2, 4});
  CHECK(y.data() == std::vector<float>{1, 1, 2, 2, 3, 3, 4, 4});
}
