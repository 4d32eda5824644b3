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


#ifndef DDZ_MODELS_H_
#define DDZ_MODELS_H_

#include <array>
#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "ddz/features.h"
#include "ddz/game.h"
#include "ddz/nn/network.h"

namespace ddz {

// Widths of the decision and prediction networks.
struct ModelShape {
  int lstm_hidden = 128;
  int width = 512;
  int decision_layers = 6;    // dense layers, the last one emits Q
  int prediction_layers = 5;  // shared dense layers before the heads
};

struct CoachShape {
  int embed = 64;
  int width = 512;
  int layers = 3;
};

// History LSTM, then [summary, state, action] through the dense stack.
nn::NetworkSpec DecisionNetSpec(const ModelShape& shape, bool with_prediction);
// History LSTM, then [summary, plain state] through shared layers and one
// softmax head per rank.
nn::NetworkSpec PredictionNetSpec(const ModelShape& shape);
// Rank embedding of 54 sorted card slots, dense stack, sigmoid output.
nn::NetworkSpec CoachNetSpec(const CoachShape& shape);

std::uint64_t DecisionLayoutHash(bool with_prediction);
std::uint64_t PredictionLayoutHash();
std::uint64_t CoachLayoutHash();

// The most recent moves as card sets, oldest first, padded at the front
// with empty sets. Encodes to EncodeHistory(state).
using CompactHistory = std::array<CardSet, kHistoryLength>;
CompactHistory RecentMoves(const GameState& state);

// Writes the 60 card-matrix entries of `cards` into `out`.
void EncodeCardSetInto(const CardSet& cards, double* out);

// History matrices for a batch; histories[j] fills column j of every step.
std::vector<nn::Matrix> HistoryBatch(std::span<const CompactHistory* const> h);

nn::Matrix ToColumn(std::span<const float> values);

// Q value of every action at one decision point, sharing the history and
// state part of the computation across actions.
std::vector<double> DecisionQValues(const nn::Network& net,
                                    std::span<const float> state,
                                    const CompactHistory& history,
                                    std::span<const Move> actions);

// Index of the largest value; ties go to the lowest index.
std::size_t ArgMax(std::span<const double> values);

}  // namespace ddz

#endif  // DDZ_MODELS_H_
