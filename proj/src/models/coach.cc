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


#include "ddz/coach.h"

#include <stdexcept>

#include "ddz/nn/loss.h"

namespace ddz {
namespace {

void AppendSorted(const CardSet& hand, nn::TokenMatrix& tokens, int col,
                  int& slot) {
  for (int r = 0; r < kNumRanks; ++r) {
    for (int k = 0; k < hand.Count(r); ++k) tokens(slot++, col) = r;
  }
}

nn::Inputs CoachInputs(std::span<const Deal> deals) {
  nn::Inputs in;
  in.tokens = DealTokens(deals);
  return in;
}

nn::Matrix Labels(std::span<const CoachExample> batch) {
  nn::Matrix y(1, static_cast<Eigen::Index>(batch.size()));
  for (std::size_t j = 0; j < batch.size(); ++j) {
    if (batch[j].outcome != 0 && batch[j].outcome != 1) {
      throw std::invalid_argument("coach outcome must be 0 or 1");
    }
    y(0, j) = batch[j].outcome;
  }
  return y;
}

std::vector<Deal> DealsOf(std::span<const CoachExample> batch) {
  std::vector<Deal> deals;
  deals.reserve(batch.size());
  for (const CoachExample& e : batch) deals.push_back(e.deal);
  return deals;
}

}  // namespace

nn::TokenMatrix DealTokens(std::span<const Deal> deals) {
  nn::TokenMatrix tokens(kCoachSlots, static_cast<Eigen::Index>(deals.size()));
  for (std::size_t j = 0; j < deals.size(); ++j) {
    ValidateDeal(deals[j]);
    int slot = 0;
    AppendSorted(deals[j].landlord, tokens, static_cast<int>(j), slot);
    AppendSorted(deals[j].down, tokens, static_cast<int>(j), slot);
    AppendSorted(deals[j].up, tokens, static_cast<int>(j), slot);
  }
  return tokens;
}

double CoachPredict(const nn::Network& net, const Deal& deal) {
  return CoachPredictBatch(net, std::span<const Deal>(&deal, 1)).front();
}

std::vector<double> CoachPredictBatch(const nn::Network& net,
                                      std::span<const Deal> deals) {
  if (deals.empty()) return {};
  const nn::Matrix p = net.Forward(CoachInputs(deals));
  return std::vector<double>(p.data(), p.data() + p.size());
}

bool AcceptDeal(double p_win, double beta) {
  if (!(beta >= 0.0 && beta <= 0.5)) {
    throw std::invalid_argument("beta must lie in [0, 0.5]");
  }
  return beta <= p_win && p_win <= 1.0 - beta;
}

double BetaSchedule::At(std::uint64_t frames) const {
  if (ramp_frames == 0 || frames >= ramp_frames) return beta_max;
  return beta_max * (static_cast<double>(frames) /
                     static_cast<double>(ramp_frames));
}

CoachStepReport CoachTrainStep(nn::Network& net, nn::Optimizer& optimizer,
                               std::span<const CoachExample> batch) {
  CoachStepReport out;
  if (batch.empty()) return out;
  const std::vector<Deal> deals = DealsOf(batch);
  nn::Cache cache;
  const nn::Matrix p = net.Forward(CoachInputs(deals), &cache);
  const nn::LossResult l = nn::BceLoss(p, Labels(batch));
  out.loss = l.value;
  out.applied =
      optimizer.Step(net.mutable_params(), net.Backward(cache, l.grad)).applied;
  return out;
}

double CoachLoss(const nn::Network& net, std::span<const CoachExample> batch) {
  const std::vector<Deal> deals = DealsOf(batch);
  return nn::BceLoss(net.Forward(CoachInputs(deals)), Labels(batch)).value;
}

}  // namespace ddz
