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


#include <algorithm>
#include <stdexcept>

#include "ddz/eval.h"

namespace ddz {
namespace {

int LowestPrincipalRank(const Move& m) {
  return m.chain_len > 0 ? m.main_rank - m.chain_len + 1 : m.main_rank;
}

}  // namespace

Move RandomAgent::Act(const GameState& state, Rng& rng) const {
  const std::vector<Move> legal = state.LegalActions();
  return legal[rng.UniformInt(legal.size())];
}

Move GreedyRuleAgent::Act(const GameState& state, Rng& /*rng*/) const {
  const std::vector<Move> legal = state.LegalActions();
  const Position me = state.current_player();
  const CardSet& hand = state.Hand(me);
  for (const Move& m : legal) {
    if (m.cards == hand) return m;
  }

  int threat = kLandlordHandSize;  // smallest opposing hand
  for (Position p : kAllPositions) {
    if (p != me && IsPeasant(p) != IsPeasant(me)) {
      threat = std::min(threat, state.Hand(p).Total());
    }
  }

  std::vector<const Move*> plain, bombs;
  for (const Move& m : legal) {
    if (m.IsPass()) continue;
    (m.IsBombLike() ? bombs : plain).push_back(&m);
  }

  if (!state.MoveToBeat()) {
    if (plain.empty()) return *bombs.front();
    // Lowest principal rank first; among those, shed the most cards.
    const Move* best = plain.front();
    for (const Move* m : plain) {
      const int a = LowestPrincipalRank(*m), b = LowestPrincipalRank(*best);
      if (a < b || (a == b && m->cards.Total() > best->cards.Total())) {
        best = m;
      }
    }
    return *best;
  }

  const Position owner = state.trick_incumbent()->position;
  if (IsPeasant(owner) && IsPeasant(me)) return Move::Pass();
  if (!plain.empty()) return *plain.front();
  if (!bombs.empty() && threat <= 5) return *bombs.front();
  return Move::Pass();
}

NetworkAgent::NetworkAgent(PolicyNets nets, std::string name)
    : nets_(std::move(nets)), name_(std::move(name)) {}

Move NetworkAgent::Act(const GameState& state, Rng& /*rng*/) const {
  return GreedyMove(nets_, state);
}

std::unique_ptr<Agent> MakeAgent(const std::string& description) {
  if (description == "random") return std::make_unique<RandomAgent>();
  if (description == "greedy") return std::make_unique<GreedyRuleAgent>();
  if (!std::filesystem::is_directory(description)) {
    throw std::invalid_argument("agent is neither random, greedy, nor a "
                                "checkpoint directory: " + description);
  }
  return std::make_unique<NetworkAgent>(PolicyNets::Load(description),
                                        description);
}

}  // namespace ddz
