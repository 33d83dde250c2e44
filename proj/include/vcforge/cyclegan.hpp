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

// Non-parallel voice conversion with a pair of 1-D gated-CNN generators and
// patch discriminators, trained with least-squares adversarial losses plus a
// cycle-consistency term. Training alternates one Adam step on both
// discriminators with one Adam step on both generators, on one random
// fixed-length segment per domain per iteration. Everything is
// single-threaded and seeded, so runs are bit-reproducible.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "vcforge/adam.hpp"
#include "vcforge/errors.hpp"
#include "vcforge/features.hpp"
#include "vcforge/io.hpp"
#include "vcforge/rng.hpp"
#include "vcforge/tensor.hpp"
#include "vcforge/vocoder.hpp"

namespace vcforge::cyclegan {

using nn::Tensor;

inline constexpr int kFeatureChannels = dsp::kCepstralOrder;

// ---------------------------------------------------------------------------
// Configuration

struct TrainConfig {
  float lambda_cyc = 10.0f;
  float lambda_identity = 0.0f;  // optional identity-mapping term, off by default
  int segment_len = 128;
  int batch_size = 1;
  float lr_generator = 0.0002f;
  float lr_discriminator = 0.0001f;
  int iterations = 2000;
  uint64_t seed = 7;
  int base_channels = 64;
  int residual_blocks = 3;
  float adam_beta1 = 0.9f;
  float adam_beta2 = 0.999f;
  float adam_epsilon = 1e-8f;

  void validate() const {
    require(lambda_cyc >= 0.0f, "config: lambda_cyc must be >= 0");
    require(lambda_identity >= 0.0f, "config: lambda_identity must be >= 0");
    require(segment_len >= 16 && segment_len % 4 == 0,
            "config: segment_len must be >= 16 and divisible by 4, got " +
                std::to_string(segment_len));
    require(batch_size >= 1, "config: batch_size must be >= 1");
    require(lr_generator > 0.0f && lr_discriminator > 0.0f,
            "config: learning rates must be positive");
    require(iterations >= 1, "config: iterations must be >= 1");
    require(base_channels >= 2, "config: base_channels must be >= 2");
    require(residual_blocks >= 0, "config: residual_blocks must be >= 0");
  }
};

// ---------------------------------------------------------------------------
// Layers

namespace layers {

struct Conv1d {
  Tensor weight;  // [c_out x c_in x k]
  Tensor bias;    // [c_out]
  int stride = 1;
  int padding = 0;

  static Conv1d make(const std::string&, int c_in, int c_out, int k, int stride, int padding,
                     SplitMix64& rng) {
    Conv1d l;
    const float bound = 1.0f / std::sqrt(static_cast<float>(c_in * k));
    l.weight = Tensor::uniform({c_out, c_in, k}, bound, rng, true);
    l.bias = Tensor::zeros({c_out}, true);
    l.stride = stride;
    l.padding = padding;
    return l;
  }

  Tensor forward(const Tensor& x) const {
    return nn::add_channel_bias(nn::conv1d(x, weight, stride, padding), bias);
  }

  void collect(const std::string& prefix, std::vector<nn::NamedTensor>& out) const {
    out.push_back({prefix + ".weight", weight});
    out.push_back({prefix + ".bias", bias});
  }
};

struct InstanceNorm {
  Tensor gain;  // [c]
  Tensor bias;  // [c]
  float epsilon = 1e-5f;

  static InstanceNorm make(int c) {
    InstanceNorm n;
    n.gain = Tensor::filled({c}, 1.0f, true);
    n.bias = Tensor::zeros({c}, true);
    return n;
  }

  Tensor forward(const Tensor& x) const { return nn::instance_norm(x, gain, bias, epsilon); }

  void collect(const std::string& prefix, std::vector<nn::NamedTensor>& out) const {
    out.push_back({prefix + ".gain", gain});
    out.push_back({prefix + ".bias", bias});
  }
};

}  // namespace layers

// ---------------------------------------------------------------------------
// Generator: in conv -> two strided GLU downsampling blocks -> residual GLU
// blocks -> two nearest-neighbor upsampling GLU blocks -> linear out conv.
// Channel capacity scales with base_channels; GLU halves each conv's output.

struct Generator {
  enum class Direction { kSourceToTarget, kTargetToSource };

  Direction direction = Direction::kSourceToTarget;
  layers::Conv1d in_conv;
  layers::Conv1d down1_conv;
  layers::InstanceNorm down1_norm;
  layers::Conv1d down2_conv;
  layers::InstanceNorm down2_norm;
  struct ResBlock {
    layers::Conv1d conv1;
    layers::InstanceNorm norm1;
    layers::Conv1d conv2;
    layers::InstanceNorm norm2;
  };
  std::vector<ResBlock> res;
  layers::Conv1d up1_conv;
  layers::InstanceNorm up1_norm;
  layers::Conv1d up2_conv;
  layers::InstanceNorm up2_norm;
  layers::Conv1d out_conv;

  static Generator make(Direction dir, const TrainConfig& cfg, SplitMix64& rng) {
    const int c = cfg.base_channels;
    Generator g;
    g.direction = dir;
    g.in_conv = layers::Conv1d::make("in", kFeatureChannels, c, 5, 1, 2, rng);
    g.down1_conv = layers::Conv1d::make("down1", c, 4 * c, 5, 2, 2, rng);
    g.down1_norm = layers::InstanceNorm::make(4 * c);
    g.down2_conv = layers::Conv1d::make("down2", 2 * c, 8 * c, 5, 2, 2, rng);
    g.down2_norm = layers::InstanceNorm::make(8 * c);
    for (int i = 0; i < cfg.residual_blocks; ++i) {
      ResBlock b;
      b.conv1 = layers::Conv1d::make("res.conv1", 4 * c, 8 * c, 3, 1, 1, rng);
      b.norm1 = layers::InstanceNorm::make(8 * c);
      b.conv2 = layers::Conv1d::make("res.conv2", 4 * c, 4 * c, 3, 1, 1, rng);
      b.norm2 = layers::InstanceNorm::make(4 * c);
      g.res.push_back(std::move(b));
    }
    g.up1_conv = layers::Conv1d::make("up1", 4 * c, 4 * c, 5, 1, 2, rng);
    g.up1_norm = layers::InstanceNorm::make(4 * c);
    g.up2_conv = layers::Conv1d::make("up2", 2 * c, 2 * c, 5, 1, 2, rng);
    g.up2_norm = layers::InstanceNorm::make(2 * c);
    g.out_conv = layers::Conv1d::make("out", c, kFeatureChannels, 5, 1, 2, rng);
    return g;
  }

  /// Forward for inputs whose length is divisible by 4 (generator_forward
  /// handles padding/cropping for other lengths).
  Tensor forward_exact(const Tensor& x) const {
    auto h = in_conv.forward(x);
    h = nn::glu(down1_norm.forward(down1_conv.forward(h)));
    h = nn::glu(down2_norm.forward(down2_conv.forward(h)));
    for (const auto& b : res) {
      auto r = nn::glu(b.norm1.forward(b.conv1.forward(h)));
      r = b.norm2.forward(b.conv2.forward(r));
      h = nn::add(h, r);
    }
    h = nn::glu(up1_norm.forward(up1_conv.forward(nn::upsample_nearest_x2(h))));
    h = nn::glu(up2_norm.forward(up2_conv.forward(nn::upsample_nearest_x2(h))));
    return out_conv.forward(h);
  }

  std::vector<nn::NamedTensor> parameters(const std::string& prefix) const {
    std::vector<nn::NamedTensor> out;
    in_conv.collect(prefix + ".in", out);
    down1_conv.collect(prefix + ".down1.conv", out);
    down1_norm.collect(prefix + ".down1.norm", out);
    down2_conv.collect(prefix + ".down2.conv", out);
    down2_norm.collect(prefix + ".down2.norm", out);
    for (size_t i = 0; i < res.size(); ++i) {
      const std::string rp = prefix + ".res" + std::to_string(i);
      res[i].conv1.collect(rp + ".conv1", out);
      res[i].norm1.collect(rp + ".norm1", out);
      res[i].conv2.collect(rp + ".conv2", out);
      res[i].norm2.collect(rp + ".norm2", out);
    }
    up1_conv.collect(prefix + ".up1.conv", out);
    up1_norm.collect(prefix + ".up1.norm", out);
    up2_conv.collect(prefix + ".up2.conv", out);
    up2_norm.collect(prefix + ".up2.norm", out);
    out_conv.collect(prefix + ".out", out);
    return out;
  }
};

/// Pads by edge replication to a multiple of 4 frames, runs the generator,
/// and crops back to the input length.
inline Tensor generator_forward(const Generator& g, const Tensor& features) {
  require(features.shape().size() == 2 && features.shape()[0] == kFeatureChannels,
          "generator_forward: expected [" + std::to_string(kFeatureChannels) +
              " x T] input, got " + nn::shape_str(features.shape()));
  const int t = features.shape()[1];
  require(t >= 1, "generator_forward: empty input");
  const int pad = (4 - t % 4) % 4;
  if (pad == 0) return g.forward_exact(features);

  const int tp = t + pad;
  std::vector<float> padded(static_cast<size_t>(kFeatureChannels) * tp);
  for (int c = 0; c < kFeatureChannels; ++c) {
    const float* src = features.data().data() + static_cast<size_t>(c) * t;
    float* dst = padded.data() + static_cast<size_t>(c) * tp;
    std::copy(src, src + t, dst);
    for (int j = t; j < tp; ++j) dst[j] = src[t - 1];
  }
  auto out = g.forward_exact(Tensor::from_data({kFeatureChannels, tp}, std::move(padded)));
  std::vector<float> cropped(static_cast<size_t>(kFeatureChannels) * t);
  for (int c = 0; c < kFeatureChannels; ++c)
    std::copy(out.data().data() + static_cast<size_t>(c) * tp,
              out.data().data() + static_cast<size_t>(c) * tp + t,
              cropped.data() + static_cast<size_t>(c) * t);
  return Tensor::from_data({kFeatureChannels, t}, std::move(cropped));
}

// ---------------------------------------------------------------------------
// Discriminator: three strided GLU conv blocks then a linear conv to a
// 1-channel patch map. No output nonlinearity (least-squares targets).

struct Discriminator {
  enum class Side { kSource, kTarget };

  Side side = Side::kSource;
  layers::Conv1d l1;
  layers::Conv1d l2;
  layers::Conv1d l3;
  layers::Conv1d out;

  static Discriminator make(Side side, const TrainConfig& cfg, SplitMix64& rng) {
    const int c = cfg.base_channels;
    Discriminator d;
    d.side = side;
    d.l1 = layers::Conv1d::make("l1", kFeatureChannels, 2 * c, 5, 2, 2, rng);
    d.l2 = layers::Conv1d::make("l2", c, 4 * c, 5, 2, 2, rng);
    d.l3 = layers::Conv1d::make("l3", 2 * c, 8 * c, 5, 2, 2, rng);
    d.out = layers::Conv1d::make("out", 4 * c, 1, 3, 1, 1, rng);
    return d;
  }

  Tensor forward(const Tensor& x) const {
    auto h = nn::glu(l1.forward(x));
    h = nn::glu(l2.forward(h));
    h = nn::glu(l3.forward(h));
    return out.forward(h);
  }

  std::vector<nn::NamedTensor> parameters(const std::string& prefix) const {
    std::vector<nn::NamedTensor> out_params;
    l1.collect(prefix + ".l1", out_params);
    l2.collect(prefix + ".l2", out_params);
    l3.collect(prefix + ".l3", out_params);
    out.collect(prefix + ".out", out_params);
    return out_params;
  }
};

inline Tensor discriminator_forward(const Discriminator& d, const Tensor& features) {
  require(features.shape().size() == 2 && features.shape()[0] == kFeatureChannels,
          "discriminator_forward: expected [" + std::to_string(kFeatureChannels) +
              " x T] input, got " + nn::shape_str(features.shape()));
  require(features.shape()[1] >= 16, "discriminator_forward: input too short, need T >= 16, got " +
                                         std::to_string(features.shape()[1]));
  return d.forward(features);
}

// ---------------------------------------------------------------------------
// Losses

struct LsganLosses {
  Tensor loss_d;      // mean((d_real - 1)^2) + mean(d_fake^2)
  Tensor loss_g_adv;  // mean((d_fake - 1)^2)
};

inline LsganLosses lsgan_losses(const Tensor& d_real, const Tensor& d_fake) {
  LsganLosses out;
  out.loss_d = nn::add(nn::mean(nn::square(nn::add_scalar(d_real, -1.0f))),
                       nn::mean(nn::square(d_fake)));
  out.loss_g_adv = nn::mean(nn::square(nn::add_scalar(d_fake, -1.0f)));
  return out;
}

/// Mean absolute error of both cycle reconstructions.
inline Tensor cycle_consistency_loss(const Tensor& x, const Tensor& f_of_g_x, const Tensor& y,
                                     const Tensor& g_of_f_y) {
  require(x.shape() == f_of_g_x.shape(), "cycle_consistency_loss: forward cycle shape mismatch " +
                                             nn::shape_str(x.shape()) + " vs " +
                                             nn::shape_str(f_of_g_x.shape()));
  require(y.shape() == g_of_f_y.shape(), "cycle_consistency_loss: backward cycle shape mismatch " +
                                             nn::shape_str(y.shape()) + " vs " +
                                             nn::shape_str(g_of_f_y.shape()));
  return nn::add(nn::mean(nn::abs_op(nn::sub(f_of_g_x, x))),
                 nn::mean(nn::abs_op(nn::sub(g_of_f_y, y))));
}

inline Tensor total_loss(const Tensor& adv_g, const Tensor& adv_f, const Tensor& cyc,
                         float lambda_cyc) {
  return nn::add(nn::add(adv_g, adv_f), nn::mul_scalar(cyc, lambda_cyc));
}

// ---------------------------------------------------------------------------
// Model

struct CycleGanModel {
  Generator g;  // source -> target
  Generator f;  // target -> source
  Discriminator d_x;
  Discriminator d_y;
  dsp::NormStats source_stats;
  dsp::NormStats target_stats;
  TrainConfig config;
  dsp::FeatureConfig features;

  static CycleGanModel make(const TrainConfig& cfg, const dsp::FeatureConfig& feat) {
    cfg.validate();
    SplitMix64 rng(cfg.seed);
    CycleGanModel m;
    m.config = cfg;
    m.features = feat;
    m.g = Generator::make(Generator::Direction::kSourceToTarget, cfg, rng);
    m.f = Generator::make(Generator::Direction::kTargetToSource, cfg, rng);
    m.d_x = Discriminator::make(Discriminator::Side::kSource, cfg, rng);
    m.d_y = Discriminator::make(Discriminator::Side::kTarget, cfg, rng);
    return m;
  }

  std::vector<nn::NamedTensor> generator_parameters() const {
    auto out = g.parameters("g");
    auto fp = f.parameters("f");
    out.insert(out.end(), fp.begin(), fp.end());
    return out;
  }

  std::vector<nn::NamedTensor> discriminator_parameters() const {
    auto out = d_x.parameters("d_x");
    auto dy = d_y.parameters("d_y");
    out.insert(out.end(), dy.begin(), dy.end());
    return out;
  }
};

struct LossRow {
  float loss_d_x = 0.0f;
  float loss_d_y = 0.0f;
  float adv_g = 0.0f;
  float adv_f = 0.0f;
  float cyc = 0.0f;
  float total = 0.0f;
};

// ---------------------------------------------------------------------------
// Segment sampling

/// Reflection index into [0, len): walks back and forth without repeating
/// the edge sample.
inline size_t reflect_index(size_t i, size_t len) {
  if (len <= 1) return 0;
  const size_t period = 2 * (len - 1);
  const size_t m = i % period;
  return m < len ? m : period - m;
}

/// Extracts a [channels x segment_len] tensor from an utterance, reading
/// reflected indices when the utterance is shorter than the segment.
inline Tensor extract_segment(const dsp::FeatureSequence& f, size_t start, int segment_len) {
  const size_t dim = f.dim();
  std::vector<float> data(dim * static_cast<size_t>(segment_len));
  for (int j = 0; j < segment_len; ++j) {
    const size_t t = reflect_index(start + static_cast<size_t>(j), f.frames());
    for (size_t c = 0; c < dim; ++c)
      data[c * static_cast<size_t>(segment_len) + static_cast<size_t>(j)] = f.mel_cepstra(t, c);
  }
  return Tensor::from_data({static_cast<int>(dim), segment_len}, std::move(data));
}

/// Uniformly samples an utterance and a window position; short utterances
/// are padded by reflection so every window has exactly segment_len frames.
inline Tensor sample_segment(std::span<const dsp::FeatureSequence> corpus, int segment_len,
                             SplitMix64& rng) {
  const size_t u = static_cast<size_t>(rng.next_below(corpus.size()));
  const auto& f = corpus[u];
  const size_t padded = std::max(f.frames(), static_cast<size_t>(segment_len));
  const size_t start = static_cast<size_t>(rng.next_below(padded - segment_len + 1));
  return extract_segment(f, start, segment_len);
}

// ---------------------------------------------------------------------------
// Trainer

class CycleGanTrainer {
 public:
  CycleGanTrainer(CycleGanModel model, std::vector<dsp::FeatureSequence> source_norm,
                  std::vector<dsp::FeatureSequence> target_norm)
      : model_(std::move(model)),
        source_(std::move(source_norm)),
        target_(std::move(target_norm)),
        sampler_rng_(SplitMix64(model_.config.seed ^ 0xA5A5A5A5A5A5A5A5ULL)),
        gen_opt_(model_.generator_parameters(), model_.config.lr_generator,
                 model_.config.adam_beta1, model_.config.adam_beta2, model_.config.adam_epsilon),
        disc_opt_(model_.discriminator_parameters(), model_.config.lr_discriminator,
                  model_.config.adam_beta1, model_.config.adam_beta2,
                  model_.config.adam_epsilon) {
    require(!source_.empty() && !target_.empty(), "train: both corpora must be nonempty");
  }

  /// One training iteration: sample a batch, one discriminator step, then
  /// one generator step on the same batch.
  LossRow iterate() {
    std::vector<Tensor> xs, ys;
    for (int b = 0; b < model_.config.batch_size; ++b) {
      xs.push_back(sample_segment(source_, model_.config.segment_len, sampler_rng_));
      ys.push_back(sample_segment(target_, model_.config.segment_len, sampler_rng_));
    }
    return run(xs, ys, true, true);
  }

  LossRow discriminator_step(const std::vector<Tensor>& xs, const std::vector<Tensor>& ys) {
    return run(xs, ys, true, false);
  }

  LossRow generator_step(const std::vector<Tensor>& xs, const std::vector<Tensor>& ys) {
    return run(xs, ys, false, true);
  }

  CycleGanModel& model() { return model_; }
  const CycleGanModel& model() const { return model_; }
  SplitMix64& sampler_rng() { return sampler_rng_; }

 private:
  static Tensor batch_mean(std::vector<Tensor> terms) {
    Tensor acc = terms[0];
    for (size_t i = 1; i < terms.size(); ++i) acc = nn::add(acc, terms[i]);
    return terms.size() > 1 ? nn::mul_scalar(acc, 1.0f / static_cast<float>(terms.size())) : acc;
  }

  LossRow run(const std::vector<Tensor>& xs, const std::vector<Tensor>& ys, bool update_d,
              bool update_g) {
    require(!xs.empty() && xs.size() == ys.size(), "train: malformed batch");
    const auto& cfg = model_.config;

    // Fakes depend only on generator parameters, so the same graphs serve
    // both phases; the discriminator phase uses detached copies.
    std::vector<Tensor> fake_y, fake_x;
    for (size_t b = 0; b < xs.size(); ++b) {
      fake_y.push_back(model_.g.forward_exact(xs[b]));
      fake_x.push_back(model_.f.forward_exact(ys[b]));
    }

    std::vector<Tensor> d_x_terms, d_y_terms;
    for (size_t b = 0; b < xs.size(); ++b) {
      d_y_terms.push_back(
          lsgan_losses(model_.d_y.forward(ys[b]), model_.d_y.forward(fake_y[b].detach())).loss_d);
      d_x_terms.push_back(
          lsgan_losses(model_.d_x.forward(xs[b]), model_.d_x.forward(fake_x[b].detach())).loss_d);
    }
    Tensor loss_d_x = batch_mean(std::move(d_x_terms));
    Tensor loss_d_y = batch_mean(std::move(d_y_terms));
    if (update_d) {
      disc_opt_.zero_grad();
      nn::backward(nn::add(loss_d_x, loss_d_y));
      disc_opt_.step();
    }

    // Generator phase, against the (possibly just updated) discriminators.
    std::vector<Tensor> adv_g_terms, adv_f_terms, cyc_terms, idt_terms;
    for (size_t b = 0; b < xs.size(); ++b) {
      adv_g_terms.push_back(
          nn::mean(nn::square(nn::add_scalar(model_.d_y.forward(fake_y[b]), -1.0f))));
      adv_f_terms.push_back(
          nn::mean(nn::square(nn::add_scalar(model_.d_x.forward(fake_x[b]), -1.0f))));
      auto cycled_x = model_.f.forward_exact(fake_y[b]);
      auto cycled_y = model_.g.forward_exact(fake_x[b]);
      cyc_terms.push_back(cycle_consistency_loss(xs[b], cycled_x, ys[b], cycled_y));
      if (cfg.lambda_identity > 0.0f) {
        auto id_y = nn::mean(nn::abs_op(nn::sub(model_.g.forward_exact(ys[b]), ys[b])));
        auto id_x = nn::mean(nn::abs_op(nn::sub(model_.f.forward_exact(xs[b]), xs[b])));
        idt_terms.push_back(nn::add(id_y, id_x));
      }
    }
    Tensor adv_g = batch_mean(std::move(adv_g_terms));
    Tensor adv_f = batch_mean(std::move(adv_f_terms));
    Tensor cyc = batch_mean(std::move(cyc_terms));
    Tensor total = total_loss(adv_g, adv_f, cyc, cfg.lambda_cyc);
    if (!idt_terms.empty())
      total = nn::add(total, nn::mul_scalar(batch_mean(std::move(idt_terms)),
                                            cfg.lambda_identity));
    if (update_g) {
      gen_opt_.zero_grad();
      nn::backward(total);
      gen_opt_.step();
    }

    LossRow row;
    row.loss_d_x = loss_d_x.item();
    row.loss_d_y = loss_d_y.item();
    row.adv_g = adv_g.item();
    row.adv_f = adv_f.item();
    row.cyc = cyc.item();
    row.total = total.item();
    return row;
  }

  CycleGanModel model_;
  std::vector<dsp::FeatureSequence> source_;
  std::vector<dsp::FeatureSequence> target_;
  SplitMix64 sampler_rng_;
  nn::AdamOptimizer gen_opt_;
  nn::AdamOptimizer disc_opt_;
};

struct TrainResult {
  CycleGanModel model;
  std::vector<LossRow> log;
};

/// Full training run: computes per-domain normalization statistics, then
/// config.iterations alternating updates. The loss log has one row per
/// iteration.
inline TrainResult train_cyclegan(std::span<const dsp::FeatureSequence> source_corpus,
                                  std::span<const dsp::FeatureSequence> target_corpus,
                                  const TrainConfig& config,
                                  const dsp::FeatureConfig& features = {}) {
  config.validate();
  require(!source_corpus.empty() && !target_corpus.empty(),
          "train_cyclegan: both corpora must be nonempty");

  auto model = CycleGanModel::make(config, features);
  model.source_stats = dsp::compute_norm_stats(source_corpus);
  model.target_stats = dsp::compute_norm_stats(target_corpus);

  std::vector<dsp::FeatureSequence> src_norm, tgt_norm;
  src_norm.reserve(source_corpus.size());
  tgt_norm.reserve(target_corpus.size());
  for (const auto& f : source_corpus) src_norm.push_back(dsp::apply_norm(f, model.source_stats));
  for (const auto& f : target_corpus) tgt_norm.push_back(dsp::apply_norm(f, model.target_stats));

  CycleGanTrainer trainer(std::move(model), std::move(src_norm), std::move(tgt_norm));
  TrainResult result;
  result.log.reserve(config.iterations);
  for (int it = 0; it < config.iterations; ++it) result.log.push_back(trainer.iterate());
  result.model = std::move(trainer.model());
  return result;
}

// ---------------------------------------------------------------------------
// Conversion

/// Feature-domain conversion: normalize with source statistics, map through
/// the source-to-target generator, denormalize with target statistics. F0 and
/// voicing are carried over from the input unchanged.
inline dsp::FeatureSequence convert_features(const CycleGanModel& model,
                                             const dsp::FeatureSequence& feats) {
  require(feats.frames() > 0, "convert: empty feature sequence");
  require(!model.source_stats.mean.empty() && !model.target_stats.mean.empty(),
          "convert: model has no normalization statistics (untrained?)");
  auto norm = dsp::apply_norm(feats, model.source_stats);
  auto in = extract_segment(norm, 0, static_cast<int>(norm.frames()));
  auto out = generator_forward(model.g, in);

  dsp::FeatureSequence converted = feats;
  const size_t t_frames = feats.frames();
  for (size_t t = 0; t < t_frames; ++t)
    for (size_t c = 0; c < feats.dim(); ++c)
      converted.mel_cepstra(t, c) = out.data()[c * t_frames + t];
  return dsp::invert_norm(converted, model.target_stats);
}

/// Waveform-level conversion: analyze, convert features, resynthesize with
/// the source F0 track.
inline dsp::Waveform convert_utterance(const CycleGanModel& model, const dsp::Waveform& w) {
  const int frame = dsp::ms_to_samples(model.features.frame_len_ms, model.features.sample_rate);
  require(w.samples.size() >= static_cast<size_t>(frame),
          "convert: audio shorter than one analysis frame (" +
              std::to_string(w.samples.size()) + " samples)");
  auto feats = dsp::analyze(w, model.features);
  auto converted = convert_features(model, feats);
  return dsp::synthesize(converted, model.features.sample_rate);
}

// ---------------------------------------------------------------------------
// Checkpoint file: "VCGK" | u32 version | config | feature config | source
// and target stats | parameter blobs for G, F, D_X, D_Y in declaration
// order. Little-endian f32 throughout.

inline constexpr char kCheckpointMagic[4] = {'V', 'C', 'G', 'K'};
inline constexpr uint32_t kCheckpointVersion = 1;

namespace detail {

inline void write_stats(std::ostream& os, const dsp::NormStats& s) {
  io::write_u32(os, static_cast<uint32_t>(s.mean.size()));
  for (float v : s.mean) io::write_f32(os, v);
  for (float v : s.std) io::write_f32(os, v);
}

inline dsp::NormStats read_stats(std::istream& is, const std::string& what) {
  dsp::NormStats s;
  const uint32_t dim = io::read_u32(is, what);
  s.mean.resize(dim);
  s.std.resize(dim);
  for (auto& v : s.mean) v = io::read_f32(is, what);
  for (auto& v : s.std) v = io::read_f32(is, what);
  return s;
}

inline void write_params(std::ostream& os, const std::vector<nn::NamedTensor>& params) {
  io::write_u32(os, static_cast<uint32_t>(params.size()));
  for (const auto& p : params) {
    io::write_u32(os, static_cast<uint32_t>(p.tensor.shape().size()));
    for (int d : p.tensor.shape()) io::write_u32(os, static_cast<uint32_t>(d));
    for (float v : p.tensor.data()) io::write_f32(os, v);
  }
}

inline void read_params(std::istream& is, std::vector<nn::NamedTensor> params,
                        const std::string& what) {
  const uint32_t n = io::read_u32(is, what + " (tensor count)");
  require(n == params.size(), what + ": checkpoint has " + std::to_string(n) +
                                  " tensors, model expects " + std::to_string(params.size()));
  for (auto& p : params) {
    const uint32_t rank = io::read_u32(is, what);
    require(rank == p.tensor.shape().size(), what + ": rank mismatch for " + p.name);
    for (int d : p.tensor.shape()) {
      const uint32_t got = io::read_u32(is, what);
      require(got == static_cast<uint32_t>(d), what + ": shape mismatch for " + p.name);
    }
    for (auto& v : p.tensor.data()) v = io::read_f32(is, what + " (" + p.name + ")");
  }
}

}  // namespace detail

inline void save_checkpoint(const std::string& path, const CycleGanModel& m) {
  auto os = io::open_out(path);
  io::write_bytes(os, kCheckpointMagic, 4);
  io::write_u32(os, kCheckpointVersion);

  const auto& c = m.config;
  io::write_f32(os, c.lambda_cyc);
  io::write_f32(os, c.lambda_identity);
  io::write_u32(os, static_cast<uint32_t>(c.segment_len));
  io::write_u32(os, static_cast<uint32_t>(c.batch_size));
  io::write_f32(os, c.lr_generator);
  io::write_f32(os, c.lr_discriminator);
  io::write_u32(os, static_cast<uint32_t>(c.iterations));
  io::write_u64(os, c.seed);
  io::write_u32(os, static_cast<uint32_t>(c.base_channels));
  io::write_u32(os, static_cast<uint32_t>(c.residual_blocks));
  io::write_f32(os, c.adam_beta1);
  io::write_f32(os, c.adam_beta2);
  io::write_f32(os, c.adam_epsilon);

  io::write_f64(os, m.features.frame_len_ms);
  io::write_f64(os, m.features.hop_ms);
  io::write_u32(os, static_cast<uint32_t>(m.features.sample_rate));
  io::write_u32(os, static_cast<uint32_t>(m.features.n_coeffs));

  detail::write_stats(os, m.source_stats);
  detail::write_stats(os, m.target_stats);

  detail::write_params(os, m.g.parameters("g"));
  detail::write_params(os, m.f.parameters("f"));
  detail::write_params(os, m.d_x.parameters("d_x"));
  detail::write_params(os, m.d_y.parameters("d_y"));
  require(static_cast<bool>(os), "checkpoint write failed: " + path);
}

inline CycleGanModel load_checkpoint(const std::string& path) {
  auto is = io::open_in(path);
  char magic[4];
  io::read_bytes(is, magic, 4, path + " (magic)");
  require(std::string(magic, 4) == std::string(kCheckpointMagic, 4),
          path + ": not a checkpoint file (bad magic)");
  const uint32_t version = io::read_u32(is, path + " (version)");
  require(version == kCheckpointVersion, path + ": unsupported checkpoint version " +
                                             std::to_string(version));

  TrainConfig c;
  c.lambda_cyc = io::read_f32(is, path);
  c.lambda_identity = io::read_f32(is, path);
  c.segment_len = static_cast<int>(io::read_u32(is, path));
  c.batch_size = static_cast<int>(io::read_u32(is, path));
  c.lr_generator = io::read_f32(is, path);
  c.lr_discriminator = io::read_f32(is, path);
  c.iterations = static_cast<int>(io::read_u32(is, path));
  c.seed = io::read_u64(is, path);
  c.base_channels = static_cast<int>(io::read_u32(is, path));
  c.residual_blocks = static_cast<int>(io::read_u32(is, path));
  c.adam_beta1 = io::read_f32(is, path);
  c.adam_beta2 = io::read_f32(is, path);
  c.adam_epsilon = io::read_f32(is, path);
  c.validate();

  dsp::FeatureConfig feat;
  feat.frame_len_ms = io::read_f64(is, path);
  feat.hop_ms = io::read_f64(is, path);
  feat.sample_rate = static_cast<int>(io::read_u32(is, path));
  feat.n_coeffs = static_cast<int>(io::read_u32(is, path));

  auto m = CycleGanModel::make(c, feat);
  m.source_stats = detail::read_stats(is, path + " (source stats)");
  m.target_stats = detail::read_stats(is, path + " (target stats)");

  detail::read_params(is, m.g.parameters("g"), path);
  detail::read_params(is, m.f.parameters("f"), path);
  detail::read_params(is, m.d_x.parameters("d_x"), path);
  detail::read_params(is, m.d_y.parameters("d_y"), path);
  return m;
}

}  // namespace vcforge::cyclegan
