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


#ifndef DDZ_COACH_H_
#define DDZ_COACH_H_

#include <cstdint>
#include <span>
#include <vector>

#include "ddz/cards.h"
#include "ddz/nn/network.h"
#include "ddz/nn/optimizer.h"

namespace ddz {

inline constexpr int kCoachSlots = kLandlordHandSize + 2 * kPeasantHandSize;

// One column of rank tokens per deal: landlord, down, up, each ascending.
nn::TokenMatrix DealTokens(std::span<const Deal> deals);

// Predicted Landlord win probability. Throws CardError on an invalid deal.
double CoachPredict(const nn::Network& net, const Deal& deal);
std::vector<double> CoachPredictBatch(const nn::Network& net,
                                      std::span<const Deal> deals);

// True iff beta <= p_win <= 1 - beta. Requires 0 <= beta <= 0.5.
bool AcceptDeal(double p_win, double beta);

struct BetaSchedule {
  double beta_max = 0.3;
  std::uint64_t ramp_frames = 0;

  // Linear ramp from 0 to beta_max over ramp_frames, constant afterwards.
  double At(std::uint64_t frames) const;
};

struct CoachExample {
  Deal deal;
  int outcome = 0;  // 1 when the Landlord won
};

struct CoachStepReport {
  double loss = 0.0;
  bool applied = false;
};

// One optimizer step on mean binary cross-entropy.
CoachStepReport CoachTrainStep(nn::Network& net, nn::Optimizer& optimizer,
                               std::span<const CoachExample> batch);

double CoachLoss(const nn::Network& net, std::span<const CoachExample> batch);

}  // namespace ddz

#endif  // DDZ_COACH_H_
