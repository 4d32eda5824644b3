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

#ifndef DDZ_MOVES_H_
#define DDZ_MOVES_H_

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "ddz/cards.h"

namespace ddz {

// Declaration order is the canonical output order.
enum class MoveCategory {
  kPass,
  kSolo,
  kPair,
  kTrio,
  kTrioSolo,
  kTrioPair,
  kChainSolo,
  kChainPair,
  kChainTrio,
  kPlaneSolo,
  kPlanePair,
  kQuadTwoSolo,
  kQuadTwoPair,
  kBomb,
  kRocket,
};
inline constexpr int kNumMoveCategories = 15;

std::string_view CategoryName(MoveCategory category);

// Rule constants. No single move may use more cards than the largest hand.
inline constexpr int kMinChainSolo = 5;
inline constexpr int kMinChainPair = 3;
inline constexpr int kMinChainTrio = 2;
inline constexpr int kMaxMoveCards = kLandlordHandSize;

struct Move {
  MoveCategory category = MoveCategory::kPass;
  int main_rank = -1;  // highest principal rank; -1 for Pass and Rocket
  int chain_len = 0;   // consecutive principal ranks for chains/planes, else 0
  CardSet cards;

  static Move Pass() { return Move{}; }
  bool IsPass() const { return category == MoveCategory::kPass; }
  bool IsBombLike() const {
    return category == MoveCategory::kBomb ||
           category == MoveCategory::kRocket;
  }

  // Kicker ranks in ascending order (cards outside the principal ranks).
  std::vector<int> KickerRanks() const;
  // "pass" or the rank-string of the cards.
  std::string ToString() const;

  friend bool operator==(const Move&, const Move&) = default;
};

// Canonical order: category, chain length, main rank, then kicker ranks.
bool CanonicalLess(const Move& a, const Move& b);

// Identifies the move formed by exactly `cards`, or nullopt if the multiset is
// not a legal combination. The empty set classifies as Pass.
std::optional<Move> Classify(const CardSet& cards);

// Why `candidate` cannot be played over `incumbent`, or nullopt if it can.
// Reasons are short rule names such as "category mismatch".
std::optional<std::string> BeatFailure(const Move& candidate,
                                       const Move& incumbent);

// Rocket beats every other move; a Bomb beats non-bombs and lower Bombs; any
// other move needs the same category and chain length with a higher main rank.
bool Beats(const Move& candidate, const Move& incumbent);

// Every distinct move playable from `hand` that beats `incumbent`, in
// canonical order. With an incumbent, Pass is included exactly once.
std::vector<Move> GenerateLegalMoves(const CardSet& hand,
                                     const std::optional<Move>& incumbent);

// All distinct non-Pass moves of at most 20 cards playable from a full deck.
const std::vector<Move>& EnumerateUniverse();

}  // namespace ddz

#endif  // DDZ_MOVES_H_
