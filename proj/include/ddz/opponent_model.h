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


#ifndef DDZ_OPPONENT_MODEL_H_
#define DDZ_OPPONENT_MODEL_H_

#include <array>
#include <span>

#include "ddz/features.h"
#include "ddz/models.h"
#include "ddz/nn/loss.h"
#include "ddz/nn/optimizer.h"

namespace ddz {

// Count distribution of every rank in the next player's hand, laid out by
// HeadOffset: five classes per ordinary rank, two per joker.
struct HandPrediction {
  std::array<double, kPredictionSize> probs{};

  double P(int rank, int count) const {
    return probs[HeadOffset(rank) + count];
  }
};

// Class c of head k is allowed iff c <= label[k].
nn::Mask LabelMask(std::span<const LegalLabel> labels);

// `state` is the plain state encoding (the leading entries of an augmented
// one).
HandPrediction PredictHand(const nn::Network& net, std::span<const float> state,
                           const CompactHistory& history,
                           const LegalLabel& label);

std::array<double, kNumRanks> ExpectedHand(const HandPrediction& prediction);

struct PredictionExample {
  std::span<const float> state;
  const CompactHistory* history = nullptr;
  LegalLabel label{};
  CountVector truth{};
};

struct PredictionLossReport {
  double loss = 0.0;             // mean over examples of the head sum
  double per_head = 0.0;         // mean over examples and heads
  double uniform_per_head = 0.0; // same for uniform logits under the mask
  int used = 0;
  int rejected = 0;              // truth outside the legal label
};

PredictionLossReport PredictionLoss(const nn::Network& net,
                                    std::span<const PredictionExample> batch);

struct PredictionStepReport {
  PredictionLossReport loss;
  bool applied = false;
};

// One optimizer step on the summed masked cross-entropy. Examples whose
// truth violates the label are dropped and counted.
PredictionStepReport PredictionTrainStep(
    nn::Network& net, nn::Optimizer& optimizer,
    std::span<const PredictionExample> batch);

}  // namespace ddz

#endif  // DDZ_OPPONENT_MODEL_H_
