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


#ifndef DDZ_POLICY_H_
#define DDZ_POLICY_H_

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <vector>

#include "ddz/game.h"
#include "ddz/models.h"
#include "ddz/nn/network.h"
#include "ddz/opponent_model.h"

namespace ddz {

// Decision networks for the three positions, plus their prediction networks
// when opponent modeling is on.
struct PolicyNets {
  std::array<nn::Network, kNumPositions> decision;
  std::array<nn::Network, kNumPositions> prediction;
  bool opponent_model = false;

  static PolicyNets Create(const ModelShape& shape, bool opponent_model,
                           std::uint64_t seed);

  // One checkpoint file per network, named after the position.
  void Save(const std::filesystem::path& dir) const;
  // Throws nn::CheckpointMismatchError when a file carries the wrong layout.
  static PolicyNets Load(const std::filesystem::path& dir);
};

std::filesystem::path DecisionCheckpointName(Position p);
std::filesystem::path PredictionCheckpointName(Position p);

// Everything the current player's networks see at one decision point.
struct DecisionPoint {
  Position position = Position::kLandlord;
  std::vector<float> state;  // decision-network state input
  CompactHistory history{};
  LegalLabel label{};
  std::optional<HandPrediction> prediction;
  std::vector<Move> legal;
  std::vector<double> q;  // empty when only one action is legal
};

// Encodes the current player's view without scoring actions (q is empty).
DecisionPoint Observe(const PolicyNets& nets, const GameState& state);
// Observe, then score every legal action.
DecisionPoint Evaluate(const PolicyNets& nets, const GameState& state);

// Greedy choice: the legal action with the highest Q.
Move GreedyMove(const PolicyNets& nets, const GameState& state);

}  // namespace ddz

#endif  // DDZ_POLICY_H_
