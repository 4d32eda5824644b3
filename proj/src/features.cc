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

#include "ddz/features.h"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace ddz {
namespace {

template <std::size_t N>
void Append(std::vector<float>& out, const std::array<float, N>& values) {
  out.insert(out.end(), values.begin(), values.end());
}

template <std::size_t N>
std::array<float, N> OneHot(int index) {
  std::array<float, N> v{};
  v[std::clamp<int>(index, 0, N - 1)] = 1.0f;
  return v;
}

FeatureLayout MakeLayout(std::string name, bool with_prediction) {
  FeatureLayout layout{kFeatureLayoutVersion, std::move(name), {}};
  int offset = 0;
  auto add = [&](const char* field, int length) {
    layout.fields.push_back({field, offset, length});
    offset += length;
  };
  add("own_hand", kCardMatrixSize);
  add("others_union", kCardMatrixSize);
  add("played_by_next", kCardMatrixSize);
  add("played_by_prev", kCardMatrixSize);
  add("last_move", kCardMatrixSize);
  add("next_count", kCountSlots);
  add("prev_count", kCountSlots);
  add("bombs", kBombSlots);
  if (with_prediction) add("next_hand_prediction", kPredictionSize);
  return layout;
}

}  // namespace

CardMatrix EncodeCardSet(const CardSet& cards) {
  CardMatrix m{};
  for (int r = 0; r < kNumRanks; ++r) {
    for (int row = 0; row < cards.Count(r); ++row) m[row * kNumRanks + r] = 1;
  }
  return m;
}

CardSet DecodeCardMatrix(std::span<const float> matrix) {
  if (matrix.size() != kCardMatrixSize) {
    throw CardError("card matrix must have 60 entries");
  }
  CardSet cards;
  for (int r = 0; r < kNumRanks; ++r) {
    int count = 0;
    bool ended = false;
    for (int row = 0; row < 4; ++row) {
      const bool set = matrix[row * kNumRanks + r] != 0.0f;
      if (set && ended) throw CardError("card matrix column is not a prefix");
      if (set) ++count;
      ended = ended || !set;
    }
    cards.Add(r, count);
  }
  return cards;
}

std::vector<float> StateFeatures::Flatten() const {
  std::vector<float> out;
  out.reserve(kSize);
  Append(out, own_hand);
  Append(out, others_union);
  Append(out, played_by_next);
  Append(out, played_by_prev);
  Append(out, last_move);
  Append(out, next_count);
  Append(out, prev_count);
  Append(out, bombs);
  return out;
}

std::vector<float> AugmentedStateFeatures::Flatten() const {
  std::vector<float> out = base.Flatten();
  Append(out, prediction);
  return out;
}

CountVector ToCounts(const CardSet& cards) {
  CountVector v{};
  for (int r = 0; r < kNumRanks; ++r) v[r] = cards.Count(r);
  return v;
}

StateFeatures EncodeState(const GameState& state, Position viewer) {
  const Position next = NextPosition(viewer);
  const Position prev = NextPosition(next);
  CardSet played_all;
  for (Position p : kAllPositions) played_all += state.Played(p);
  const CardSet& own = state.Hand(viewer);

  StateFeatures f;
  f.own_hand = EncodeCardSet(own);
  f.others_union = EncodeCardSet(CardSet::FullDeck() - own - played_all);
  f.played_by_next = EncodeCardSet(state.Played(next));
  f.played_by_prev = EncodeCardSet(state.Played(prev));
  const auto& incumbent = state.trick_incumbent();
  if (incumbent && incumbent->position != viewer) {
    f.last_move = EncodeCardSet(incumbent->move.cards);
  }
  f.next_count = OneHot<kCountSlots>(state.Hand(next).Total());
  f.prev_count = OneHot<kCountSlots>(state.Hand(prev).Total());
  f.bombs = OneHot<kBombSlots>(state.bombs_played());
  return f;
}

HistorySequence EncodeHistory(const GameState& state) {
  HistorySequence seq{};
  const auto& history = state.history();
  const int n = static_cast<int>(history.size());
  const int take = std::min(n, kHistoryLength);
  for (int i = 0; i < take; ++i) {
    const Move& m = history[n - take + i].move;
    seq[kHistoryLength - take + i] = EncodeCardSet(m.cards);
  }
  return seq;
}

LegalLabel ComputeLegalLabel(const GameState& state, Position viewer) {
  CardSet played_all;
  for (Position p : kAllPositions) played_all += state.Played(p);
  const CardSet& own = state.Hand(viewer);
  LegalLabel bound{};
  for (int r = 0; r < kNumRanks; ++r) {
    bound[r] = RankMax(r) - own.Count(r) - played_all.Count(r);
  }
  return bound;
}

AugmentedStateFeatures Augment(const StateFeatures& features,
                               std::span<const double> prediction) {
  if (prediction.size() != kPredictionSize) {
    throw std::invalid_argument("prediction must have 69 entries");
  }
  AugmentedStateFeatures out;
  out.base = features;
  for (int r = 0; r < kNumRanks; ++r) {
    double sum = 0;
    for (int c = 0; c < HeadClasses(r); ++c) {
      const double p = prediction[HeadOffset(r) + c];
      sum += p;
      out.prediction[HeadOffset(r) + c] = static_cast<float>(p);
    }
    if (!(std::abs(sum - 1.0) <= 1e-4)) {
      throw std::invalid_argument(std::string("prediction block for rank ") +
                                  RankChar(r) + " is not normalized");
    }
  }
  return out;
}

int FeatureLayout::Size() const {
  return fields.empty() ? 0 : fields.back().offset + fields.back().length;
}

std::string FeatureLayout::Describe() const {
  std::ostringstream os;
  os << name << " v" << version;
  for (const FieldLayout& f : fields) {
    os << ';' << f.name << '@' << f.offset << '+' << f.length;
  }
  return os.str();
}

std::uint64_t FeatureLayout::Hash() const { return Fnv1a64(Describe()); }

const FeatureLayout& PlainStateLayout() {
  static const FeatureLayout layout = MakeLayout("state", false);
  return layout;
}

const FeatureLayout& AugmentedStateLayout() {
  static const FeatureLayout layout = MakeLayout("state+prediction", true);
  return layout;
}

std::uint64_t Fnv1a64(std::string_view text) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

}  // namespace ddz
