// Copyright 2026 The DouDizhu Lab Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.


// Test-only neural oracles: a straight-line scalar forward pass that shares
// no code with the Eigen implementation, and central finite-difference
// gradient checks over random small configurations.

#ifndef DDZ_TESTS_ORACLE_NN_ORACLE_H_
#define DDZ_TESTS_ORACLE_NN_ORACLE_H_

#include <algorithm>
#include <cmath>
#include <functional>
#include <string>
#include <vector>

#include "ddz/nn/loss.h"
#include "ddz/nn/network.h"
#include "ddz/rng.h"

namespace ddz::oracle {

using nn::Activation;
using nn::LayerKind;
using nn::LayerSpec;
using nn::Matrix;
using nn::Network;
using nn::NetworkSpec;

inline double Act(double z, Activation a) {
  switch (a) {
    case Activation::kLinear: return z;
    case Activation::kRelu: return z > 0 ? z : 0.0;
    case Activation::kSigmoid: return 1.0 / (1.0 + std::exp(-z));
    case Activation::kTanh: return std::tanh(z);
  }
  return z;
}

inline double Sig(double z) { return 1.0 / (1.0 + std::exp(-z)); }

// Output for one sample column, computed with scalar loops.
inline std::vector<double> NaiveForwardOne(const Network& net,
                                           const nn::Inputs& in, int col) {
  const NetworkSpec& spec = net.spec();
  std::vector<double> x;
  if (const LayerSpec* e = spec.embedding()) {
    const Matrix& t = net.params().Get("embedding.table");
    for (int s = 0; s < e->c; ++s) {
      for (int d = 0; d < e->b; ++d) x.push_back(t(d, in.tokens(s, col)));
    }
  }
  if (const LayerSpec* r = spec.recurrent()) {
    const int h = r->b;
    const Matrix& wx = net.params().Get("recurrent.wx");
    const Matrix& wh = net.params().Get("recurrent.wh");
    const Matrix& b = net.params().Get("recurrent.b");
    std::vector<double> hid(h, 0.0), cell(h, 0.0);
    for (const Matrix& xt : in.sequence) {
      std::vector<double> z(4 * h);
      for (int k = 0; k < 4 * h; ++k) {
        double acc = b(k, 0);
        for (int i = 0; i < r->a; ++i) acc += wx(k, i) * xt(i, col);
        for (int i = 0; i < h; ++i) acc += wh(k, i) * hid[i];
        z[k] = acc;
      }
      for (int k = 0; k < h; ++k) {
        const double ig = Sig(z[k]), fg = Sig(z[h + k]);
        const double gg = std::tanh(z[2 * h + k]), og = Sig(z[3 * h + k]);
        cell[k] = fg * cell[k] + ig * gg;
        hid[k] = og * std::tanh(cell[k]);
      }
    }
    x.insert(x.end(), hid.begin(), hid.end());
  }
  for (int i = 0; i < spec.side_size(); ++i) x.push_back(in.side(i, col));

  int dense = 0;
  for (const LayerSpec& l : spec.layers()) {
    if (l.kind != LayerKind::kDense && l.kind != LayerKind::kMultiHead) {
      continue;
    }
    const bool head = l.kind == LayerKind::kMultiHead;
    const std::string prefix =
        head ? "head" : "dense" + std::to_string(dense++);
    const Matrix& w = net.params().Get(prefix + ".w");
    const Matrix& b = net.params().Get(prefix + ".b");
    std::vector<double> y(w.rows());
    for (int o = 0; o < w.rows(); ++o) {
      double acc = b(o, 0);
      for (int i = 0; i < w.cols(); ++i) acc += w(o, i) * x[i];
      y[o] = Act(acc, l.activation);
    }
    x = std::move(y);
  }
  return x;
}

inline double MaxRelError(double analytic, double numeric) {
  const double denom = std::max({std::abs(analytic), std::abs(numeric), 1e-6});
  return std::abs(analytic - numeric) / denom;
}

inline constexpr double kFdStep = 1e-5;

inline double Uniform(Rng& rng, double lo, double hi) {
  return lo + (hi - lo) * rng.UniformReal();
}

inline int Dim(Rng& rng, int lo, int hi) {
  return lo + static_cast<int>(rng.UniformInt(hi - lo + 1));
}

inline nn::Inputs RandomInputs(const NetworkSpec& spec, int batch, Rng& rng) {
  nn::Inputs in;
  if (const LayerSpec* e = spec.embedding()) {
    in.tokens.resize(e->c, batch);
    for (int j = 0; j < batch; ++j) {
      for (int s = 0; s < e->c; ++s) {
        in.tokens(s, j) = static_cast<int>(rng.UniformInt(e->a));
      }
    }
  }
  if (const LayerSpec* r = spec.recurrent()) {
    for (int t = 0; t < r->c; ++t) {
      Matrix x(r->a, batch);
      for (Eigen::Index k = 0; k < x.size(); ++k) {
        x.data()[k] = Uniform(rng, -1.5, 1.5);
      }
      in.sequence.push_back(std::move(x));
    }
  }
  in.side.resize(spec.side_size(), batch);
  for (Eigen::Index k = 0; k < in.side.size(); ++k) {
    in.side.data()[k] = Uniform(rng, -1.5, 1.5);
  }
  return in;
}

// Random small network exercising `kind` (with `act` for dense layers).
inline NetworkSpec RandomSpecFor(const std::string& kind, Rng& rng) {
  std::vector<LayerSpec> layers;
  int width = 0;
  if (kind == "embedding") {
    const int vocab = Dim(rng, 2, 6), dim = Dim(rng, 1, 4);
    const int tokens = Dim(rng, 1, 4);
    layers.push_back({LayerKind::kEmbedding, vocab, dim, tokens});
    width += dim * tokens;
  }
  if (kind == "recurrent") {
    const int input = Dim(rng, 1, 4), hidden = Dim(rng, 1, 4);
    layers.push_back({LayerKind::kRecurrent, input, hidden, Dim(rng, 1, 5)});
    width += hidden;
  }
  if (kind != "embedding" || rng.UniformInt(2)) {
    const int side = Dim(rng, 1, 4);
    layers.push_back({LayerKind::kSide, side});
    width += side;
  }
  if (kind == "multi_head") {
    std::vector<int> heads(Dim(rng, 1, 4));
    for (int& h : heads) h = Dim(rng, 1, 5);
    layers.push_back({LayerKind::kMultiHead, width, 0, 0,
                      Activation::kLinear, heads});
    return NetworkSpec(std::move(layers));
  }
  Activation act = Activation::kTanh;
  if (kind == "dense_linear") act = Activation::kLinear;
  if (kind == "dense_relu") act = Activation::kRelu;
  if (kind == "dense_sigmoid") act = Activation::kSigmoid;
  const int hidden = Dim(rng, 1, 5);
  layers.push_back({LayerKind::kDense, width, hidden, 0, act});
  layers.push_back({LayerKind::kDense, hidden, Dim(rng, 1, 3), 0,
                    Activation::kLinear});
  return NetworkSpec(std::move(layers));
}

inline const std::vector<std::string>& LayerKinds() {
  static const std::vector<std::string> kinds = {
      "dense_linear", "dense_relu", "dense_sigmoid", "dense_tanh",
      "recurrent",    "embedding",  "multi_head"};
  return kinds;
}

inline const std::vector<std::string>& LossKinds() {
  static const std::vector<std::string> kinds = {"mse", "masked_cross_entropy",
                                                 "bce"};
  return kinds;
}

// True when some ReLU pre-activation sits so close to the kink that a
// finite difference would straddle it.
inline bool NearReluKink(const Network& net, const nn::Inputs& in) {
  nn::Cache cache;
  net.Forward(in, &cache);
  int k = 0;
  for (const LayerSpec& l : net.spec().layers()) {
    if (l.kind != LayerKind::kDense && l.kind != LayerKind::kMultiHead) {
      continue;
    }
    if (l.activation == Activation::kRelu) {
      const std::string prefix = "dense" + std::to_string(k);
      Matrix z = net.params().Get(prefix + ".w") * cache.layer_in[k];
      z.colwise() += net.params().Get(prefix + ".b").col(0);
      if ((z.array().abs() < 1e-3).any()) return true;
    }
    ++k;
  }
  return false;
}

// Max relative error between backward and central differences over every
// parameter of `configs` random networks of one layer kind. The scalar loss
// is a random linear functional of the output.
inline double LayerGradientCheck(const std::string& kind, int configs,
                                 std::uint64_t seed) {
  Rng rng(seed);
  double worst = 0.0;
  for (int c = 0; c < configs;) {
    const NetworkSpec spec = RandomSpecFor(kind, rng);
    Network net(spec, rng());
    const int batch = Dim(rng, 1, 3);
    const nn::Inputs in = RandomInputs(spec, batch, rng);
    if (NearReluKink(net, in)) continue;
    Matrix weights(spec.output_size(), batch);
    for (Eigen::Index k = 0; k < weights.size(); ++k) {
      weights.data()[k] = Uniform(rng, -1, 1);
    }
    auto loss = [&](const Network& n) {
      return (n.Forward(in).array() * weights.array()).sum();
    };
    nn::Cache cache;
    net.Forward(in, &cache);
    const nn::Gradients g = net.Backward(cache, weights);
    Network probe = net;
    for (std::size_t t = 0; t < probe.params().tensors.size(); ++t) {
      Matrix& p = probe.mutable_params().tensors[t].second;
      for (Eigen::Index k = 0; k < p.size(); ++k) {
        const double orig = p.data()[k];
        p.data()[k] = orig + kFdStep;
        const double up = loss(probe);
        p.data()[k] = orig - kFdStep;
        const double down = loss(probe);
        p.data()[k] = orig;
        const double numeric = (up - down) / (2 * kFdStep);
        worst = std::max(worst, MaxRelError(g[t].data()[k], numeric));
      }
    }
    ++c;
  }
  return worst;
}

// Same check for a loss, differentiating with respect to its input.
inline double LossGradientCheck(const std::string& kind, int configs,
                                std::uint64_t seed) {
  Rng rng(seed);
  double worst = 0.0;
  for (int c = 0; c < configs; ++c) {
    const int rows = Dim(rng, 1, 5), cols = Dim(rng, 1, 4);
    Matrix pred(rows, cols), target(rows, cols);
    std::vector<int> labels(cols);
    nn::Mask mask(rows, cols);
    std::function<nn::LossResult(const Matrix&)> fn;
    if (kind == "mse") {
      for (Eigen::Index k = 0; k < pred.size(); ++k) {
        pred.data()[k] = Uniform(rng, -2, 2);
        target.data()[k] = Uniform(rng, -2, 2);
      }
      fn = [&](const Matrix& p) { return nn::MseLoss(p, target); };
    } else if (kind == "bce") {
      for (Eigen::Index k = 0; k < pred.size(); ++k) {
        pred.data()[k] = Uniform(rng, 0.05, 0.95);
        target.data()[k] = static_cast<double>(rng.UniformInt(2));
      }
      fn = [&](const Matrix& p) { return nn::BceLoss(p, target); };
    } else {
      for (Eigen::Index k = 0; k < pred.size(); ++k) {
        pred.data()[k] = Uniform(rng, -3, 3);
        mask.data()[k] = rng.UniformInt(3) != 0;
      }
      for (int j = 0; j < cols; ++j) {
        labels[j] = static_cast<int>(rng.UniformInt(rows));
        mask(labels[j], j) = true;
      }
      fn = [&](const Matrix& p) {
        return nn::MaskedCrossEntropy(p, labels, mask);
      };
    }
    const Matrix analytic = fn(pred).grad;
    Matrix probe = pred;
    for (Eigen::Index k = 0; k < probe.size(); ++k) {
      const double orig = probe.data()[k];
      probe.data()[k] = orig + kFdStep;
      const double up = fn(probe).value;
      probe.data()[k] = orig - kFdStep;
      const double down = fn(probe).value;
      probe.data()[k] = orig;
      worst = std::max(worst, MaxRelError(analytic.data()[k],
                                          (up - down) / (2 * kFdStep)));
    }
  }
  return worst;
}

}  // namespace ddz::oracle

#endif  // DDZ_TESTS_ORACLE_NN_ORACLE_H_
