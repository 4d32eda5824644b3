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


#include "ddz/policy.h"

#include <string>

#include "ddz/nn/serialize.h"
#include "ddz/rng.h"

namespace ddz {

std::filesystem::path DecisionCheckpointName(Position p) {
  return std::string(PositionName(p)) + ".ckpt";
}

std::filesystem::path PredictionCheckpointName(Position p) {
  return "prediction_" + std::string(PositionName(p)) + ".ckpt";
}

PolicyNets PolicyNets::Create(const ModelShape& shape, bool opponent_model,
                              std::uint64_t seed) {
  PolicyNets nets;
  nets.opponent_model = opponent_model;
  for (Position p : kAllPositions) {
    const int i = Index(p);
    nets.decision[i] = nn::Network(DecisionNetSpec(shape, opponent_model),
                                   DeriveSeed(seed, i));
    nets.decision[i].mutable_params().layout_hash =
        DecisionLayoutHash(opponent_model);
    if (opponent_model) {
      nets.prediction[i] =
          nn::Network(PredictionNetSpec(shape), DeriveSeed(seed, 10 + i));
      nets.prediction[i].mutable_params().layout_hash = PredictionLayoutHash();
    }
  }
  return nets;
}

void PolicyNets::Save(const std::filesystem::path& dir) const {
  std::filesystem::create_directories(dir);
  for (Position p : kAllPositions) {
    nn::SaveNetwork(dir / DecisionCheckpointName(p), decision[Index(p)]);
    if (opponent_model) {
      nn::SaveNetwork(dir / PredictionCheckpointName(p), prediction[Index(p)]);
    }
  }
}

PolicyNets PolicyNets::Load(const std::filesystem::path& dir) {
  PolicyNets nets;
  const std::uint64_t landlord_layout =
      nn::ReadCheckpointHeader(dir / DecisionCheckpointName(Position::kLandlord))
          .layout_hash;
  if (landlord_layout == DecisionLayoutHash(true)) {
    nets.opponent_model = true;
  } else if (landlord_layout != DecisionLayoutHash(false)) {
    throw nn::CheckpointMismatchError(
        (dir / DecisionCheckpointName(Position::kLandlord)).string() +
        ": unknown feature layout");
  }
  for (Position p : kAllPositions) {
    const int i = Index(p);
    nets.decision[i] = nn::LoadNetwork(dir / DecisionCheckpointName(p), 0,
                                       landlord_layout);
    if (nets.decision[i].spec().side_size() !=
        (nets.opponent_model ? AugmentedStateFeatures::kSize
                             : StateFeatures::kSize) +
            kCardMatrixSize) {
      throw nn::CheckpointMismatchError("decision network input size mismatch");
    }
    if (nets.opponent_model) {
      nets.prediction[i] = nn::LoadNetwork(dir / PredictionCheckpointName(p),
                                           0, PredictionLayoutHash());
    }
  }
  return nets;
}

DecisionPoint Observe(const PolicyNets& nets, const GameState& state) {
  DecisionPoint d;
  d.position = state.current_player();
  d.legal = state.LegalActions();
  d.history = RecentMoves(state);
  const StateFeatures features = EncodeState(state, d.position);
  d.label = ComputeLegalLabel(state, d.position);
  if (nets.opponent_model) {
    const std::vector<float> plain = features.Flatten();
    d.prediction = PredictHand(nets.prediction[Index(d.position)], plain,
                               d.history, d.label);
    d.state = Augment(features, d.prediction->probs).Flatten();
  } else {
    d.state = features.Flatten();
  }
  return d;
}

DecisionPoint Evaluate(const PolicyNets& nets, const GameState& state) {
  DecisionPoint d = Observe(nets, state);
  if (d.legal.size() > 1) {
    d.q = DecisionQValues(nets.decision[Index(d.position)], d.state, d.history,
                          d.legal);
  }
  return d;
}

Move GreedyMove(const PolicyNets& nets, const GameState& state) {
  const DecisionPoint d = Evaluate(nets, state);
  return d.q.empty() ? d.legal.front() : d.legal[ArgMax(d.q)];
}

}  // namespace ddz
