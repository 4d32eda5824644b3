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

#include "ddz/moves.h"

#include <algorithm>
#include <array>
#include <functional>

namespace ddz {
namespace {

constexpr std::array<std::string_view, kNumMoveCategories> kCategoryNames = {
    "Pass",      "Solo",      "Pair",        "Trio",        "TrioSolo",
    "TrioPair",  "ChainSolo", "ChainPair",   "ChainTrio",   "PlaneSolo",
    "PlanePair", "QuadTwoSolo", "QuadTwoPair", "Bomb",      "Rocket"};

// Number of principal copies per rank for each category (0 = not ranked).
int PrincipalWidth(MoveCategory c) {
  switch (c) {
    case MoveCategory::kSolo:
    case MoveCategory::kChainSolo:
      return 1;
    case MoveCategory::kPair:
    case MoveCategory::kChainPair:
      return 2;
    case MoveCategory::kTrio:
    case MoveCategory::kTrioSolo:
    case MoveCategory::kTrioPair:
    case MoveCategory::kChainTrio:
    case MoveCategory::kPlaneSolo:
    case MoveCategory::kPlanePair:
      return 3;
    case MoveCategory::kQuadTwoSolo:
    case MoveCategory::kQuadTwoPair:
    case MoveCategory::kBomb:
      return 4;
    default:
      return 0;
  }
}

Move MakeMove(MoveCategory category, int main_rank, int chain_len,
              CardSet cards) {
  Move m;
  m.category = category;
  m.main_rank = main_rank;
  m.chain_len = chain_len;
  m.cards = cards;
  return m;
}

// Calls fn(chosen) for every k-subset of `pool`, preserving pool order.
void ForEachCombination(const std::vector<int>& pool, int k,
                        const std::function<void(const std::vector<int>&)>& fn) {
  std::vector<int> chosen;
  std::function<void(std::size_t)> rec = [&](std::size_t start) {
    if (static_cast<int>(chosen.size()) == k) {
      fn(chosen);
      return;
    }
    const std::size_t need = k - chosen.size();
    for (std::size_t i = start; i + need <= pool.size(); ++i) {
      chosen.push_back(pool[i]);
      rec(i + 1);
      chosen.pop_back();
    }
  };
  rec(0);
}

class Generator {
 public:
  Generator(const CardSet& hand, std::vector<Move>* out)
      : hand_(hand), out_(out) {}

  void Category(MoveCategory c) {
    switch (c) {
      case MoveCategory::kPass:
        break;
      case MoveCategory::kSolo:
        Singles(1, MoveCategory::kSolo);
        break;
      case MoveCategory::kPair:
        Singles(2, MoveCategory::kPair);
        break;
      case MoveCategory::kTrio:
        Singles(3, MoveCategory::kTrio);
        break;
      case MoveCategory::kBomb:
        Singles(4, MoveCategory::kBomb);
        break;
      case MoveCategory::kRocket:
        if (hand_.Count(kBlackJoker) && hand_.Count(kRedJoker)) {
          CardSet cards;
          cards.Add(kBlackJoker);
          cards.Add(kRedJoker);
          out_->push_back(MakeMove(MoveCategory::kRocket, -1, 0, cards));
        }
        break;
      case MoveCategory::kTrioSolo:
        WithKickers(3, 1, 1, MoveCategory::kTrioSolo);
        break;
      case MoveCategory::kTrioPair:
        WithKickers(3, 2, 1, MoveCategory::kTrioPair);
        break;
      case MoveCategory::kQuadTwoSolo:
        WithKickers(4, 1, 2, MoveCategory::kQuadTwoSolo);
        break;
      case MoveCategory::kQuadTwoPair:
        WithKickers(4, 2, 2, MoveCategory::kQuadTwoPair);
        break;
      case MoveCategory::kChainSolo:
        Chains(1, kMinChainSolo, MoveCategory::kChainSolo);
        break;
      case MoveCategory::kChainPair:
        Chains(2, kMinChainPair, MoveCategory::kChainPair);
        break;
      case MoveCategory::kChainTrio:
        Chains(3, kMinChainTrio, MoveCategory::kChainTrio);
        break;
      case MoveCategory::kPlaneSolo:
        for (int len = kMinChainTrio; len * 4 <= kMaxMoveCards; ++len) {
          PlaneKickers(len, 1, MoveCategory::kPlaneSolo);
        }
        break;
      case MoveCategory::kPlanePair:
        for (int len = kMinChainTrio; len * 5 <= kMaxMoveCards; ++len) {
          PlaneKickers(len, 2, MoveCategory::kPlanePair);
        }
        break;
    }
  }

 private:
  static int MaxRankFor(int width) { return width == 1 ? kRedJoker : kRankTwo; }

  void Singles(int width, MoveCategory c) {
    for (int r = 0; r <= MaxRankFor(width); ++r) {
      if (hand_.Count(r) >= width) {
        CardSet cards;
        cards.Add(r, width);
        out_->push_back(MakeMove(c, r, 0, cards));
      }
    }
  }

  // A single principal rank of `width` copies plus `num_kickers` kickers of
  // `kicker_width` copies each, kicker ranks distinct and not the principal.
  void WithKickers(int width, int kicker_width, int num_kickers,
                   MoveCategory c) {
    for (int r = 0; r <= kRankTwo; ++r) {
      if (hand_.Count(r) < width) continue;
      std::vector<int> pool;
      for (int k = 0; k <= MaxRankFor(kicker_width); ++k) {
        if (k != r && hand_.Count(k) >= kicker_width) pool.push_back(k);
      }
      ForEachCombination(pool, num_kickers, [&](const std::vector<int>& ks) {
        CardSet cards;
        cards.Add(r, width);
        for (int k : ks) cards.Add(k, kicker_width);
        out_->push_back(MakeMove(c, r, 0, cards));
      });
    }
  }

  void Chains(int width, int min_len, MoveCategory c) {
    for (int start = 0; start <= kRankAce; ++start) {
      for (int len = 1; start + len - 1 <= kRankAce; ++len) {
        const int top = start + len - 1;
        if (hand_.Count(top) < width) break;
        if (len < min_len || len * width > kMaxMoveCards) continue;
        CardSet cards;
        for (int r = start; r <= top; ++r) cards.Add(r, width);
        out_->push_back(MakeMove(c, top, len, cards));
      }
    }
  }

  void PlaneKickers(int len, int kicker_width, MoveCategory c) {
    for (int start = 0; start + len - 1 <= kRankAce; ++start) {
      const int top = start + len - 1;
      bool ok = true;
      for (int r = start; r <= top && ok; ++r) ok = hand_.Count(r) >= 3;
      if (!ok) continue;
      std::vector<int> pool;
      for (int k = 0; k <= MaxRankFor(kicker_width); ++k) {
        if ((k < start || k > top) && hand_.Count(k) >= kicker_width) {
          pool.push_back(k);
        }
      }
      ForEachCombination(pool, len, [&](const std::vector<int>& ks) {
        CardSet cards;
        for (int r = start; r <= top; ++r) cards.Add(r, 3);
        for (int k : ks) cards.Add(k, kicker_width);
        out_->push_back(MakeMove(c, top, len, cards));
      });
    }
  }

  const CardSet& hand_;
  std::vector<Move>* out_;
};

bool AreConsecutive(const std::vector<int>& ranks) {
  for (std::size_t i = 1; i < ranks.size(); ++i) {
    if (ranks[i] != ranks[i - 1] + 1) return false;
  }
  return !ranks.empty() && ranks.back() <= kRankAce;
}

}  // namespace

std::string_view CategoryName(MoveCategory category) {
  return kCategoryNames[static_cast<int>(category)];
}

std::vector<int> Move::KickerRanks() const {
  const int width = PrincipalWidth(category);
  CardSet principal;
  if (width > 0) {
    const int len = chain_len > 0 ? chain_len : 1;
    for (int r = main_rank - len + 1; r <= main_rank; ++r) {
      principal.Add(r, width);
    }
  } else {
    principal = cards;
  }
  return (cards - principal).Ranks();
}

std::string Move::ToString() const {
  return IsPass() ? std::string("pass") : cards.ToString();
}

bool CanonicalLess(const Move& a, const Move& b) {
  if (a.category != b.category) return a.category < b.category;
  if (a.chain_len != b.chain_len) return a.chain_len < b.chain_len;
  if (a.main_rank != b.main_rank) return a.main_rank < b.main_rank;
  return a.KickerRanks() < b.KickerRanks();
}

std::optional<Move> Classify(const CardSet& cards) {
  const int n = cards.Total();
  if (n == 0) return Move::Pass();
  if (n > kMaxMoveCards) return std::nullopt;
  std::array<std::vector<int>, 5> by_count;
  for (int r = 0; r < kNumRanks; ++r) {
    if (cards.Count(r) > 0) by_count[cards.Count(r)].push_back(r);
  }
  const auto& ones = by_count[1];
  const auto& twos = by_count[2];
  const auto& threes = by_count[3];
  const auto& fours = by_count[4];

  if (n == 1) return MakeMove(MoveCategory::kSolo, ones[0], 0, cards);
  if (n == 2 && cards.Count(kBlackJoker) && cards.Count(kRedJoker)) {
    return MakeMove(MoveCategory::kRocket, -1, 0, cards);
  }
  if (!fours.empty()) {
    if (fours.size() != 1 || !threes.empty()) return std::nullopt;
    const int q = fours[0];
    if (n == 4) return MakeMove(MoveCategory::kBomb, q, 0, cards);
    if (twos.empty() && ones.size() == 2) {
      return MakeMove(MoveCategory::kQuadTwoSolo, q, 0, cards);
    }
    if (ones.empty() && twos.size() == 2) {
      return MakeMove(MoveCategory::kQuadTwoPair, q, 0, cards);
    }
    return std::nullopt;
  }
  if (!threes.empty()) {
    const int len = static_cast<int>(threes.size());
    if (len == 1) {
      const int t = threes[0];
      if (n == 3) return MakeMove(MoveCategory::kTrio, t, 0, cards);
      if (n == 4) return MakeMove(MoveCategory::kTrioSolo, t, 0, cards);
      if (n == 5 && twos.size() == 1) {
        return MakeMove(MoveCategory::kTrioPair, t, 0, cards);
      }
      return std::nullopt;
    }
    if (!AreConsecutive(threes)) return std::nullopt;
    const int top = threes.back();
    if (ones.empty() && twos.empty()) {
      return MakeMove(MoveCategory::kChainTrio, top, len, cards);
    }
    if (twos.empty() && static_cast<int>(ones.size()) == len) {
      return MakeMove(MoveCategory::kPlaneSolo, top, len, cards);
    }
    if (ones.empty() && static_cast<int>(twos.size()) == len) {
      return MakeMove(MoveCategory::kPlanePair, top, len, cards);
    }
    return std::nullopt;
  }
  if (!twos.empty()) {
    if (!ones.empty()) return std::nullopt;
    const int len = static_cast<int>(twos.size());
    if (len == 1) return MakeMove(MoveCategory::kPair, twos[0], 0, cards);
    if (len >= kMinChainPair && AreConsecutive(twos)) {
      return MakeMove(MoveCategory::kChainPair, twos.back(), len, cards);
    }
    return std::nullopt;
  }
  const int len = static_cast<int>(ones.size());
  if (len >= kMinChainSolo && AreConsecutive(ones)) {
    return MakeMove(MoveCategory::kChainSolo, ones.back(), len, cards);
  }
  return std::nullopt;
}

std::optional<std::string> BeatFailure(const Move& candidate,
                                       const Move& incumbent) {
  using C = MoveCategory;
  if (candidate.IsPass()) return "pass is not a play";
  if (incumbent.IsPass()) return std::nullopt;
  if (incumbent.category == C::kRocket) return "nothing beats a rocket";
  if (candidate.category == C::kRocket) return std::nullopt;
  if (candidate.category == C::kBomb) {
    if (incumbent.category != C::kBomb) return std::nullopt;
    if (candidate.main_rank > incumbent.main_rank) return std::nullopt;
    return "rank not higher";
  }
  if (incumbent.category == C::kBomb) return "only a higher bomb beats a bomb";
  if (candidate.category != incumbent.category) return "category mismatch";
  if (candidate.chain_len != incumbent.chain_len) {
    return "chain length mismatch";
  }
  if (candidate.main_rank <= incumbent.main_rank) return "rank not higher";
  return std::nullopt;
}

bool Beats(const Move& candidate, const Move& incumbent) {
  return !BeatFailure(candidate, incumbent).has_value();
}

std::vector<Move> GenerateLegalMoves(const CardSet& hand,
                                     const std::optional<Move>& incumbent) {
  std::vector<Move> moves;
  Generator gen(hand, &moves);
  const bool responding = incumbent.has_value() && !incumbent->IsPass();
  if (!responding) {
    for (int c = 1; c < kNumMoveCategories; ++c) {
      gen.Category(static_cast<MoveCategory>(c));
    }
  } else {
    if (!incumbent->IsBombLike()) gen.Category(incumbent->category);
    if (incumbent->category != MoveCategory::kRocket) {
      gen.Category(MoveCategory::kBomb);
      gen.Category(MoveCategory::kRocket);
    }
    std::erase_if(moves, [&](const Move& m) { return !Beats(m, *incumbent); });
  }
  if (incumbent.has_value()) moves.push_back(Move::Pass());
  std::sort(moves.begin(), moves.end(), CanonicalLess);
  return moves;
}

const std::vector<Move>& EnumerateUniverse() {
  static const std::vector<Move> universe =
      GenerateLegalMoves(CardSet::FullDeck(), std::nullopt);
  return universe;
}

}  // namespace ddz
