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

#ifndef DDZ_FEATURES_H_
#define DDZ_FEATURES_H_

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "ddz/cards.h"
#include "ddz/game.h"

namespace ddz {

// 4x15 matrix flattened row-major: entry [row * 15 + rank] is 1 iff the set
// holds at least row + 1 copies of rank.
inline constexpr int kCardMatrixSize = 4 * kNumRanks;
using CardMatrix = std::array<float, kCardMatrixSize>;

CardMatrix EncodeCardSet(const CardSet& cards);
// Inverse of EncodeCardSet. Throws CardError on non-prefix columns.
CardSet DecodeCardMatrix(std::span<const float> matrix);

inline constexpr int kHistoryLength = 15;
inline constexpr int kCountSlots = 21;  // one-hot over 0..20 remaining cards
inline constexpr int kBombSlots = 15;   // one-hot over 0..14 bombs
// 13 ranks x 5 count classes + 2 jokers x 2 classes.
inline constexpr int kPredictionSize = 13 * 5 + 2 * 2;

struct StateFeatures {
  CardMatrix own_hand{};
  CardMatrix others_union{};
  CardMatrix played_by_next{};  // next player in turn order
  CardMatrix played_by_prev{};  // the player after that
  CardMatrix last_move{};       // move to beat; zero when leading
  std::array<float, kCountSlots> next_count{};
  std::array<float, kCountSlots> prev_count{};
  std::array<float, kBombSlots> bombs{};

  static constexpr int kSize = 5 * kCardMatrixSize + 2 * kCountSlots + kBombSlots;
  std::vector<float> Flatten() const;
};

// Oldest first, zero-padded at the front; Pass rows are all zero.
using HistorySequence = std::array<CardMatrix, kHistoryLength>;

struct AugmentedStateFeatures {
  StateFeatures base;
  std::array<float, kPredictionSize> prediction{};

  static constexpr int kSize = StateFeatures::kSize + kPredictionSize;
  std::vector<float> Flatten() const;
};

// Per-rank upper bound on what the viewer's next player can hold.
using LegalLabel = std::array<int, kNumRanks>;
using CountVector = std::array<int, kNumRanks>;

// Number of count classes per rank head: 5 for ordinary ranks, 2 for jokers.
constexpr int HeadClasses(int rank) { return RankMax(rank) + 1; }
// Offset of rank's block inside a flattened prediction vector.
constexpr int HeadOffset(int rank) {
  return rank <= kRankTwo ? rank * 5 : 13 * 5 + (rank - kBlackJoker) * 2;
}

StateFeatures EncodeState(const GameState& state, Position viewer);
HistorySequence EncodeHistory(const GameState& state);
LegalLabel ComputeLegalLabel(const GameState& state, Position viewer);
CountVector ToCounts(const CardSet& cards);

// Throws std::invalid_argument if any block deviates from sum 1 by > 1e-4.
AugmentedStateFeatures Augment(const StateFeatures& features,
                               std::span<const double> prediction);

// Named slice of a flat feature vector.
struct FieldLayout {
  std::string name;
  int offset;
  int length;
};

struct FeatureLayout {
  int version;
  std::string name;
  std::vector<FieldLayout> fields;

  int Size() const;
  std::string Describe() const;
  std::uint64_t Hash() const;
};

inline constexpr int kFeatureLayoutVersion = 1;
const FeatureLayout& PlainStateLayout();
const FeatureLayout& AugmentedStateLayout();

std::uint64_t Fnv1a64(std::string_view text);

}  // namespace ddz

#endif  // DDZ_FEATURES_H_
