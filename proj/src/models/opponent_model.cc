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


#include "ddz/opponent_model.h"

#include <cmath>
#include <vector>

namespace ddz {
namespace {

bool WithinLabel(const PredictionExample& e) {
  for (int r = 0; r < kNumRanks; ++r) {
    if (e.truth[r] < 0 || e.truth[r] > e.label[r]) return false;
  }
  return true;
}

struct Forwarded {
  std::vector<const PredictionExample*> kept;
  nn::Matrix logits;
  nn::Cache cache;
};

Forwarded Run(const nn::Network& net, std::span<const PredictionExample> batch,
              bool keep_cache) {
  Forwarded f;
  for (const PredictionExample& e : batch) {
    if (WithinLabel(e)) f.kept.push_back(&e);
  }
  if (f.kept.empty()) return f;
  const int n = static_cast<int>(f.kept.size());
  std::vector<const CompactHistory*> hist(n);
  nn::Inputs in;
  in.side.resize(StateFeatures::kSize, n);
  for (int j = 0; j < n; ++j) {
    hist[j] = f.kept[j]->history;
    for (int i = 0; i < StateFeatures::kSize; ++i) {
      in.side(i, j) = f.kept[j]->state[i];
    }
  }
  in.sequence = HistoryBatch(hist);
  f.logits = net.Forward(in, keep_cache ? &f.cache : nullptr);
  return f;
}

// Fills the report and returns dLoss/dlogits.
nn::Matrix HeadLosses(const Forwarded& f, PredictionLossReport& report) {
  const int n = static_cast<int>(f.kept.size());
  nn::Matrix grad = nn::Matrix::Zero(kPredictionSize, n);
  report.used = n;
  if (n == 0) return grad;
  for (int r = 0; r < kNumRanks; ++r) {
    const int k = HeadClasses(r);
    nn::Mask mask(k, n);
    std::vector<int> labels(n);
    for (int j = 0; j < n; ++j) {
      labels[j] = f.kept[j]->truth[r];
      for (int c = 0; c < k; ++c) mask(c, j) = c <= f.kept[j]->label[r];
      report.uniform_per_head += std::log(f.kept[j]->label[r] + 1.0);
    }
    const nn::LossResult l = nn::MaskedCrossEntropy(
        f.logits.middleRows(HeadOffset(r), k), labels, mask);
    report.loss += l.value;
    grad.middleRows(HeadOffset(r), k) = l.grad;
  }
  report.per_head = report.loss / kNumRanks;
  report.uniform_per_head /= static_cast<double>(n) * kNumRanks;
  return grad;
}

}  // namespace

nn::Mask LabelMask(std::span<const LegalLabel> labels) {
  nn::Mask mask = nn::Mask::Constant(kPredictionSize,
                                     static_cast<Eigen::Index>(labels.size()),
                                     false);
  for (std::size_t j = 0; j < labels.size(); ++j) {
    for (int r = 0; r < kNumRanks; ++r) {
      for (int c = 0; c < HeadClasses(r); ++c) {
        mask(HeadOffset(r) + c, j) = c <= labels[j][r];
      }
    }
  }
  return mask;
}

HandPrediction PredictHand(const nn::Network& net, std::span<const float> state,
                           const CompactHistory& history,
                           const LegalLabel& label) {
  nn::Inputs in;
  const CompactHistory* one[] = {&history};
  in.sequence = HistoryBatch(one);
  in.side = ToColumn(state.first(StateFeatures::kSize));
  const nn::Matrix logits = net.Forward(in);
  const LegalLabel labels[] = {label};
  const nn::Mask mask = LabelMask(labels);
  HandPrediction out;
  for (int r = 0; r < kNumRanks; ++r) {
    const int k = HeadClasses(r);
    const nn::Matrix p = nn::MaskedSoftmax(logits.middleRows(HeadOffset(r), k),
                                           mask.middleRows(HeadOffset(r), k));
    for (int c = 0; c < k; ++c) out.probs[HeadOffset(r) + c] = p(c, 0);
  }
  return out;
}

std::array<double, kNumRanks> ExpectedHand(const HandPrediction& prediction) {
  std::array<double, kNumRanks> out{};
  for (int r = 0; r < kNumRanks; ++r) {
    for (int c = 1; c < HeadClasses(r); ++c) out[r] += c * prediction.P(r, c);
  }
  return out;
}

PredictionLossReport PredictionLoss(const nn::Network& net,
                                    std::span<const PredictionExample> batch) {
  PredictionLossReport report;
  const Forwarded f = Run(net, batch, false);
  report.rejected = static_cast<int>(batch.size() - f.kept.size());
  HeadLosses(f, report);
  return report;
}

PredictionStepReport PredictionTrainStep(
    nn::Network& net, nn::Optimizer& optimizer,
    std::span<const PredictionExample> batch) {
  PredictionStepReport out;
  const Forwarded f = Run(net, batch, true);
  out.loss.rejected = static_cast<int>(batch.size() - f.kept.size());
  if (f.kept.empty()) return out;
  const nn::Matrix grad = HeadLosses(f, out.loss);
  out.applied = optimizer.Step(net.mutable_params(), net.Backward(f.cache, grad))
                    .applied;
  return out;
}

}  // namespace ddz
