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


#include <cmath>
#include <iostream>
#include <sstream>

#include <gtest/gtest.h>

#include "ddz/nn/loss.h"
#include "ddz/nn/network.h"
#include "ddz/nn/optimizer.h"
#include "ddz/nn/serialize.h"
#include "oracle/nn_oracle.h"

namespace ddz::nn {
namespace {

NetworkSpec Dense(int in, int out, Activation a = Activation::kLinear) {
  return NetworkSpec({{LayerKind::kSide, in}, {LayerKind::kDense, in, out, 0, a}});
}

NetworkSpec Mixed() {
  return NetworkSpec::Parse(
      "embedding 6 3 4\n"
      "recurrent 5 4 3\n"
      "side 7\n"
      "dense 23 8 relu\n"
      "dense 8 6 tanh\n"
      "multi_head 6 5,5,2\n");
}

TEST(NetworkSpecTest, ParseDescribeRoundTrip) {
  const NetworkSpec spec = Mixed();
  EXPECT_EQ(NetworkSpec::Parse(spec.Describe()), spec);
  EXPECT_EQ(spec.trunk_input_size(), 3 * 4 + 4 + 7);
  EXPECT_EQ(spec.output_size(), 12);
  EXPECT_NE(spec.Hash(), Dense(2, 2).Hash());
}

TEST(NetworkSpecTest, RejectsIncompatibleLayers) {
  EXPECT_THROW(NetworkSpec::Parse("side 3\ndense 4 2 relu\n"), ShapeError);
  EXPECT_THROW(NetworkSpec::Parse("side 3\n"), ShapeError);
  EXPECT_THROW(NetworkSpec::Parse("side 3\nmulti_head 3 2\ndense 2 1 relu\n"),
               ShapeError);
  EXPECT_THROW(NetworkSpec::Parse("side 3\nrecurrent 2 2 2\ndense 5 1 relu\n"),
               ShapeError);
  EXPECT_THROW(NetworkSpec::Parse("side 3\nconv 3 3\n"), ShapeError);
}

TEST(ForwardTest, ZeroWeightsGiveZeroOutput) {
  Network net(Dense(3, 2), 1);
  for (auto& [name, m] : net.mutable_params().tensors) m.setZero();
  Inputs in;
  in.side = Matrix::Random(3, 4);
  EXPECT_TRUE(net.Forward(in).isZero(0.0));
}

TEST(ForwardTest, IdentityDenseIsIdentity) {
  Network net(Dense(4, 4), 1);
  net.mutable_params().Get("dense0.w").setIdentity();
  net.mutable_params().Get("dense0.b").setZero();
  Inputs in;
  in.side = Matrix::Random(4, 3);
  EXPECT_EQ(net.Forward(in), in.side);
}

TEST(ForwardTest, ShapeMismatchThrows) {
  Network net(Mixed(), 3);
  Rng rng(1);
  Inputs in = oracle::RandomInputs(net.spec(), 2, rng);
  in.side = Matrix::Zero(6, 2);
  EXPECT_THROW(net.Forward(in), ShapeError);
  in = oracle::RandomInputs(net.spec(), 2, rng);
  in.sequence.pop_back();
  EXPECT_THROW(net.Forward(in), ShapeError);
  in = oracle::RandomInputs(net.spec(), 2, rng);
  in.tokens(0, 0) = 6;
  EXPECT_THROW(net.Forward(in), ShapeError);
}

TEST(ForwardTest, NonFiniteOutputThrows) {
  Network net(Dense(2, 1), 1);
  Inputs in;
  in.side = Matrix::Constant(2, 1, std::nan(""));
  EXPECT_THROW(net.Forward(in), NonFiniteError);
}

TEST(ForwardTest, MatchesNaiveOracle) {
  Rng rng(2024);
  for (int trial = 0; trial < 200; ++trial) {
    const auto& kinds = oracle::LayerKinds();
    const NetworkSpec spec =
        trial == 0 ? Mixed()
                   : oracle::RandomSpecFor(kinds[trial % kinds.size()], rng);
    Network net(spec, rng());
    const int batch = 1 + static_cast<int>(rng.UniformInt(4));
    const Inputs in = oracle::RandomInputs(spec, batch, rng);
    const Matrix out = net.Forward(in);
    for (int j = 0; j < batch; ++j) {
      const std::vector<double> want = oracle::NaiveForwardOne(net, in, j);
      ASSERT_EQ(static_cast<int>(want.size()), out.rows());
      for (int i = 0; i < out.rows(); ++i) {
        EXPECT_LE(std::abs(out(i, j) - want[i]),
                  1e-10 * std::max(1.0, std::abs(want[i])));
      }
    }
  }
}

TEST(ForwardTest, SharedPathMatchesFullBatch) {
  const NetworkSpec spec = NetworkSpec::Parse(
      "recurrent 5 4 3\nside 9\ndense 13 8 relu\ndense 8 1 linear\n");
  Network net(spec, 5);
  Rng rng(9);
  Inputs shared = oracle::RandomInputs(spec, 1, rng);
  const Matrix tail = Matrix::Random(3, 6);
  const Matrix lead = shared.side.topRows(6);
  Inputs full;
  for (const Matrix& x : shared.sequence) {
    full.sequence.push_back(x.replicate(1, 6));
  }
  full.side.resize(9, 6);
  full.side.topRows(6) = lead.replicate(1, 6);
  full.side.bottomRows(3) = tail;
  shared.side = lead;
  const Matrix fast = net.ForwardShared(shared, tail);
  const Matrix slow = net.Forward(full);
  EXPECT_LE((fast - slow).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(BackwardTest, PerfectPredictionGivesZeroGradient) {
  Network net(Mixed(), 4);
  Rng rng(4);
  const Inputs in = oracle::RandomInputs(net.spec(), 3, rng);
  Cache cache;
  const Matrix out = net.Forward(in, &cache);
  const LossResult l = MseLoss(out, out);
  EXPECT_EQ(l.value, 0.0);
  for (const Matrix& g : net.Backward(cache, l.grad)) {
    EXPECT_TRUE(g.isZero(0.0));
  }
}

TEST(BackwardTest, ScalarNetMatchesClosedForm) {
  // y = sigmoid(w x + b), L = (y - t)^2, so dL/dw = 2 (y - t) y (1 - y) x.
  Network net(Dense(1, 1, Activation::kSigmoid), 1);
  const double w = 0.7, b = -0.2, x = 1.3, t = 0.9;
  net.mutable_params().Get("dense0.w")(0, 0) = w;
  net.mutable_params().Get("dense0.b")(0, 0) = b;
  Inputs in;
  in.side = Matrix::Constant(1, 1, x);
  Cache cache;
  const Matrix out = net.Forward(in, &cache);
  const double y = 1.0 / (1.0 + std::exp(-(w * x + b)));
  EXPECT_DOUBLE_EQ(out(0, 0), y);
  const Gradients g =
      net.Backward(cache, MseLoss(out, Matrix::Constant(1, 1, t)).grad);
  EXPECT_NEAR(g[0](0, 0), 2 * (y - t) * y * (1 - y) * x, 1e-15);
  EXPECT_NEAR(g[1](0, 0), 2 * (y - t) * y * (1 - y), 1e-15);
}

TEST(BackwardTest, CacheMismatchThrows) {
  Network a(Dense(2, 1), 1), b(Dense(3, 1), 1);
  Inputs in;
  in.side = Matrix::Zero(2, 1);
  Cache cache;
  a.Forward(in, &cache);
  EXPECT_THROW(b.Backward(cache, Matrix::Zero(1, 1)), ShapeError);
  EXPECT_THROW(a.Backward(cache, Matrix::Zero(2, 1)), ShapeError);
}

class LayerGradientTest : public ::testing::TestWithParam<std::string> {};

TEST_P(LayerGradientTest, FiniteDifferencesAgree) {
  const double worst = oracle::LayerGradientCheck(GetParam(), 100, 17);
  RecordProperty("max_rel_error", std::to_string(worst));
  std::cout << GetParam() << " max relative error " << worst << "\n";
  EXPECT_LT(worst, 1e-4);
}

INSTANTIATE_TEST_SUITE_P(AllLayers, LayerGradientTest,
                         ::testing::ValuesIn(oracle::LayerKinds()));

class LossGradientTest : public ::testing::TestWithParam<std::string> {};

TEST_P(LossGradientTest, FiniteDifferencesAgree) {
  const double worst = oracle::LossGradientCheck(GetParam(), 100, 23);
  std::cout << GetParam() << " max relative error " << worst << "\n";
  EXPECT_LT(worst, 1e-4);
}

INSTANTIATE_TEST_SUITE_P(AllLosses, LossGradientTest,
                         ::testing::ValuesIn(oracle::LossKinds()));

TEST(LossTest, MseExamples) {
  const Matrix a = Matrix::Random(3, 2);
  EXPECT_EQ(MseLoss(a, a).value, 0.0);
  EXPECT_NEAR(MseLoss(a.array() + 0.5, a).value, 0.25, 1e-15);
  Rng rng(3);
  const Matrix p = Matrix::Random(4, 5), t = Matrix::Random(4, 5);
  double sum = 0;
  for (int j = 0; j < 5; ++j) {
    for (int i = 0; i < 4; ++i) sum += (p(i, j) - t(i, j)) * (p(i, j) - t(i, j));
  }
  EXPECT_NEAR(MseLoss(p, t).value, sum / 20, 1e-15);
  EXPECT_THROW(MseLoss(p, a), ShapeError);
}

TEST(LossTest, MaskedCrossEntropyExamples) {
  Matrix logits = Matrix::Zero(4, 1);
  Mask two = Mask::Constant(4, 1, false);
  two(1, 0) = two(3, 0) = true;
  for (int label : {1, 3}) {
    const std::vector<int> y = {label};
    EXPECT_NEAR(MaskedCrossEntropy(logits, y, two).value, std::log(2.0), 1e-15);
  }
  Mask forced = Mask::Constant(4, 1, false);
  forced(2, 0) = true;
  logits << 5, -1, 0.3, 9;
  const std::vector<int> y2 = {2};
  const LossResult r = MaskedCrossEntropy(logits, y2, forced);
  EXPECT_EQ(r.value, 0.0);
  EXPECT_TRUE(r.grad.isZero(0.0));
  const std::vector<int> bad = {0};
  EXPECT_THROW(MaskedCrossEntropy(logits, bad, forced), std::invalid_argument);
  EXPECT_THROW(MaskedSoftmax(logits, Mask::Constant(4, 1, false)),
               std::invalid_argument);
}

TEST(LossTest, MaskedSoftmaxMatchesRenormalization) {
  Rng rng(8);
  for (int trial = 0; trial < 500; ++trial) {
    const int k = 1 + static_cast<int>(rng.UniformInt(6));
    Matrix logits(k, 1);
    Mask mask(k, 1);
    for (int i = 0; i < k; ++i) {
      logits(i, 0) = oracle::Uniform(rng, -4, 4);
      mask(i, 0) = rng.UniformInt(2);
    }
    mask(rng.UniformInt(k), 0) = true;
    // Full softmax, then zero the disallowed classes and renormalize.
    std::vector<double> full(k);
    double z = 0;
    for (int i = 0; i < k; ++i) z += full[i] = std::exp(logits(i, 0));
    double kept = 0;
    for (int i = 0; i < k; ++i) {
      full[i] = mask(i, 0) ? full[i] / z : 0.0;
      kept += full[i];
    }
    const Matrix p = MaskedSoftmax(logits, mask);
    for (int i = 0; i < k; ++i) {
      EXPECT_NEAR(p(i, 0), full[i] / kept, 1e-10);
      if (!mask(i, 0)) {
        EXPECT_EQ(p(i, 0), 0.0);
      }
    }
  }
}

TEST(LossTest, BceExamples) {
  for (double y : {0.0, 1.0}) {
    EXPECT_NEAR(BceLoss(Matrix::Constant(1, 1, 0.5), Matrix::Constant(1, 1, y))
                    .value,
                std::log(2.0), 1e-15);
  }
  EXPECT_LT(BceLoss(Matrix::Constant(1, 1, 1 - 1e-9), Matrix::Ones(1, 1)).value,
            1e-6);
  const LossResult clamped = BceLoss(Matrix::Zero(1, 1), Matrix::Ones(1, 1));
  EXPECT_NEAR(clamped.value, -std::log(kBceClamp), 1e-9);
  EXPECT_TRUE(std::isfinite(clamped.grad(0, 0)));
  const double p = 0.37;
  EXPECT_NEAR(BceLoss(Matrix::Constant(1, 1, p), Matrix::Zero(1, 1)).value,
              -std::log(1 - p), 1e-15);
}

TEST(OptimizerTest, ZeroGradientLeavesParameters) {
  Network net(Mixed(), 1);
  for (OptimizerKind kind : {OptimizerKind::kRmsProp, OptimizerKind::kSgd}) {
    Parameters p = net.params();
    Optimizer opt({kind, 0.1}, p);
    const StepReport r = opt.Step(p, ZeroGradients(p));
    EXPECT_TRUE(r.applied);
    EXPECT_EQ(p.tensors, net.params().tensors);
    EXPECT_EQ(p.counter, net.params().counter + 1);
  }
}

TEST(OptimizerTest, SgdUnitRateSubtractsGradient) {
  Network net(Dense(3, 2), 1);
  Parameters p = net.params();
  Optimizer opt({OptimizerKind::kSgd, 1.0}, p);
  Gradients g = ZeroGradients(p);
  g[0] = Matrix::Random(2, 3);
  g[1] = Matrix::Random(2, 1);
  opt.Step(p, g);
  EXPECT_EQ(p.tensors[0].second, net.params().tensors[0].second - g[0]);
  EXPECT_EQ(p.tensors[1].second, net.params().tensors[1].second - g[1]);
}

TEST(OptimizerTest, NonFiniteGradientIsSkipped) {
  Network net(Dense(3, 2), 1);
  Parameters p = net.params();
  Optimizer opt({}, p);
  Gradients g = ZeroGradients(p);
  g[0](0, 0) = std::numeric_limits<double>::infinity();
  EXPECT_FALSE(opt.Step(p, g).applied);
  EXPECT_EQ(p, net.params());
  EXPECT_EQ(opt.skipped_steps(), 1u);
}

TEST(OptimizerTest, RmsPropDescendsQuadraticBowl) {
  // L = mean((W x + b - t)^2) over a fixed batch.
  Network net(Dense(4, 3), 11);
  Inputs in;
  in.side = Matrix::Random(4, 16);
  const Matrix target = Matrix::Random(3, 16);
  Optimizer opt({OptimizerKind::kRmsProp, 1e-2}, net.params());
  double prev = std::numeric_limits<double>::infinity();
  for (int step = 0; step < 100; ++step) {
    Cache cache;
    const LossResult l = MseLoss(net.Forward(in, &cache), target);
    EXPECT_LT(l.value, prev) << "step " << step;
    prev = l.value;
    opt.Step(net.mutable_params(), net.Backward(cache, l.grad));
  }
}

TEST(SerializationTest, RoundTripIsBitIdentical) {
  Network net(Mixed(), 21);
  net.mutable_params().layout_hash = 0xABCDEF;
  net.mutable_params().counter = 77;
  const auto dir = std::filesystem::temp_directory_path() / "ddz_nn_test";
  std::filesystem::create_directories(dir);
  const auto path = dir / "net.ckpt";
  SaveNetwork(path, net);
  const Network back = LoadNetwork(path, net.spec().Hash(), 0xABCDEF);
  EXPECT_EQ(back.params(), net.params());
  EXPECT_EQ(back.spec(), net.spec());
  Rng rng(5);
  const Inputs in = oracle::RandomInputs(net.spec(), 4, rng);
  const Matrix a = net.Forward(in), b = back.Forward(in);
  EXPECT_EQ(std::memcmp(a.data(), b.data(), sizeof(double) * a.size()), 0);
  EXPECT_THROW(LoadNetwork(path, 0, 1), CheckpointMismatchError);
  EXPECT_THROW(LoadNetwork(path, 1, 0), CheckpointMismatchError);
  EXPECT_EQ(ReadCheckpointHeader(path).counter, 77u);
  EXPECT_THROW(LoadNetwork(dir / "missing.ckpt"), CheckpointError);

  std::stringstream truncated;
  WriteNetwork(truncated, net);
  std::string bytes = truncated.str();
  bytes.resize(bytes.size() / 2);
  std::stringstream half(bytes);
  EXPECT_THROW(ReadNetwork(half), CheckpointError);
  std::filesystem::remove_all(dir);
}

TEST(SerializationTest, OptimizerStateRoundTrip) {
  Network net(Dense(3, 2), 1);
  Optimizer opt({}, net.params());
  Gradients g = ZeroGradients(net.params());
  g[0].setConstant(0.3);
  opt.Step(net.mutable_params(), g);
  std::stringstream ss;
  opt.Write(ss);
  Optimizer back;
  back.Read(ss);
  Parameters p1 = net.params(), p2 = net.params();
  opt.Step(p1, g);
  back.Step(p2, g);
  EXPECT_EQ(p1, p2);
}

TEST(DeterminismTest, SameSeedSameTrajectory) {
  auto run = [] {
    Network net(Mixed(), 99);
    Rng rng(100);
    Optimizer opt({}, net.params());
    for (int step = 0; step < 20; ++step) {
      const Inputs in = oracle::RandomInputs(net.spec(), 3, rng);
      Cache cache;
      const Matrix out = net.Forward(in, &cache);
      opt.Step(net.mutable_params(),
               net.Backward(cache, MseLoss(out, Matrix::Zero(12, 3)).grad));
    }
    return net.params();
  };
  EXPECT_EQ(run(), run());
}

}  // namespace
}  // namespace ddz::nn
