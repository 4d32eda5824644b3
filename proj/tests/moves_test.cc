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
#include <map>
#include <set>

#include <gtest/gtest.h>

#include "ddz/rng.h"
#include "oracle/rules_oracle.h"

namespace ddz {
namespace {

Move M(const char* cards) {
  auto m = Classify(ParseCards(cards));
  EXPECT_TRUE(m.has_value()) << cards;
  return *m;
}

std::set<oracle::Signature> Signatures(const std::vector<Move>& moves) {
  std::set<oracle::Signature> out;
  for (const Move& m : moves) out.insert(oracle::ToSignature(m));
  return out;
}

CardSet RandomHand(Rng& rng, int max_cards) {
  std::vector<int> deck = CardSet::FullDeck().Ranks();
  const int n = 1 + static_cast<int>(rng.UniformInt(max_cards));
  CardSet hand;
  for (int i = 0; i < n; ++i) {
    const std::size_t j = i + rng.UniformInt(deck.size() - i);
    std::swap(deck[i], deck[j]);
    hand.Add(deck[i]);
  }
  return hand;
}

TEST(ClassifyTest, Categories) {
  EXPECT_EQ(M("3").category, MoveCategory::kSolo);
  EXPECT_EQ(M("R").category, MoveCategory::kSolo);
  EXPECT_EQ(M("22").category, MoveCategory::kPair);
  EXPECT_EQ(M("BR").category, MoveCategory::kRocket);
  EXPECT_EQ(M("777").category, MoveCategory::kTrio);
  EXPECT_EQ(M("7773").category, MoveCategory::kTrioSolo);
  EXPECT_EQ(M("777B").category, MoveCategory::kTrioSolo);
  EXPECT_EQ(M("77733").category, MoveCategory::kTrioPair);
  EXPECT_EQ(M("34567").category, MoveCategory::kChainSolo);
  EXPECT_EQ(M("3456789TJQKA").chain_len, 12);
  EXPECT_EQ(M("334455").category, MoveCategory::kChainPair);
  EXPECT_EQ(M("333444").category, MoveCategory::kChainTrio);
  EXPECT_EQ(M("33344458").category, MoveCategory::kPlaneSolo);
  EXPECT_EQ(M("333444BR").category, MoveCategory::kPlaneSolo);
  EXPECT_EQ(M("3334445588").category, MoveCategory::kPlanePair);
  EXPECT_EQ(M("333356").category, MoveCategory::kQuadTwoSolo);
  EXPECT_EQ(M("3333BR").category, MoveCategory::kQuadTwoSolo);
  EXPECT_EQ(M("33335566").category, MoveCategory::kQuadTwoPair);
  EXPECT_EQ(M("3333").category, MoveCategory::kBomb);

  const Move plane = M("33344458");
  EXPECT_EQ(plane.main_rank, 1);
  EXPECT_EQ(plane.chain_len, 2);
  EXPECT_EQ(plane.KickerRanks(), (std::vector<int>{2, 5}));
}

TEST(ClassifyTest, Rejections) {
  for (const char* bad : {"34", "3456", "JQKA2", "3344", "AA22KK", "AAA222",
                          "33345", "333455", "333444555666777888999",
                          "33334", "333344", "33334444", "3334446",
                          "333444556"}) {
    EXPECT_FALSE(Classify(ParseCards(bad)).has_value()) << bad;
  }
}

TEST(BeatsTest, Examples) {
  EXPECT_TRUE(Beats(M("BR"), M("3333")));
  EXPECT_FALSE(Beats(M("44"), M("77")));
  EXPECT_TRUE(Beats(M("5555"), M("34567")));
  EXPECT_FALSE(Beats(M("34567"), M("5555")));
  EXPECT_TRUE(Beats(M("6666"), M("5555")));
  EXPECT_FALSE(Beats(M("5555"), M("BR")));
  EXPECT_FALSE(Beats(M("45678"), M("3456789")));
  EXPECT_TRUE(Beats(M("456789"), M("345678")));
  EXPECT_EQ(BeatFailure(M("3"), M("44")), "category mismatch");
  EXPECT_EQ(BeatFailure(M("45678"), M("3456789")), "chain length mismatch");
  EXPECT_EQ(BeatFailure(M("33"), M("44")), "rank not higher");
}

TEST(BeatsTest, IrreflexiveAndTotalOrderWithinShape) {
  const auto& universe = EnumerateUniverse();
  std::map<std::pair<int, int>, std::vector<const Move*>> groups;
  for (const Move& m : universe) {
    EXPECT_FALSE(Beats(m, m)) << m.ToString();
    groups[{static_cast<int>(m.category), m.chain_len}].push_back(&m);
  }
  Rng rng(3);
  for (auto& [key, moves] : groups) {
    for (int t = 0; t < 200; ++t) {
      const Move& a = *moves[rng.UniformInt(moves.size())];
      const Move& b = *moves[rng.UniformInt(moves.size())];
      if (key.first == static_cast<int>(MoveCategory::kRocket)) continue;
      EXPECT_EQ(Beats(a, b), a.main_rank > b.main_rank);
      if (a.main_rank != b.main_rank) {
        EXPECT_NE(Beats(a, b), Beats(b, a));
      }
    }
  }
}

TEST(BeatsTest, MatchesOracleTable) {
  const auto& universe = EnumerateUniverse();
  Rng rng(8);
  for (int t = 0; t < 20000; ++t) {
    const Move& a = universe[rng.UniformInt(universe.size())];
    const Move& b = universe[rng.UniformInt(universe.size())];
    EXPECT_EQ(Beats(a, b),
              oracle::OracleBeats({a.category, a.main_rank, a.chain_len},
                                  {b.category, b.main_rank, b.chain_len}));
  }
}

TEST(GenerateTest, SingleAceAgainstPair) {
  const auto moves = GenerateLegalMoves(ParseCards("A"), M("KK"));
  ASSERT_EQ(moves.size(), 1u);
  EXPECT_TRUE(moves[0].IsPass());
}

TEST(GenerateTest, FourThrees) {
  const auto moves = GenerateLegalMoves(ParseCards("3333"), std::nullopt);
  ASSERT_EQ(moves.size(), 4u);
  EXPECT_EQ(moves[0].ToString(), "3");
  EXPECT_EQ(moves[1].ToString(), "33");
  EXPECT_EQ(moves[2].ToString(), "333");
  EXPECT_EQ(moves[3].ToString(), "3333");
  EXPECT_EQ(moves[3].category, MoveCategory::kBomb);
}

TEST(GenerateTest, TableCaseOneLandlordHandMatchesBruteForce) {
  const CardSet hand = ParseCards("3455677789JQKAAAA22R");
  const auto moves = GenerateLegalMoves(hand, std::nullopt);
  const auto expected =
      oracle::OracleLegalMoves(oracle::ToOracleCounts(hand), std::nullopt);
  // Frozen from the brute-force oracle.
  EXPECT_EQ(expected.size(), 125u);
  EXPECT_EQ(Signatures(moves), expected);
  EXPECT_EQ(moves.size(), expected.size());
}

TEST(GenerateTest, OracleEquivalenceSmallHands) {
  Rng rng(2024);
  const auto& universe = EnumerateUniverse();
  for (int t = 0; t < 300; ++t) {
    const CardSet hand = RandomHand(rng, 12);
    std::optional<Move> incumbent;
    if (rng.UniformInt(4) != 0) {
      incumbent = universe[rng.UniformInt(universe.size())];
    }
    const auto moves = GenerateLegalMoves(hand, incumbent);
    std::optional<oracle::Shape> inc;
    if (incumbent) {
      inc = oracle::Shape{incumbent->category, incumbent->main_rank,
                          incumbent->chain_len};
    }
    EXPECT_EQ(Signatures(moves),
              oracle::OracleLegalMoves(oracle::ToOracleCounts(hand), inc))
        << hand.ToString();
  }
}

TEST(GenerateTest, Invariants) {
  Rng rng(77);
  for (int t = 0; t < 300; ++t) {
    const CardSet hand = RandomHand(rng, 20);
    for (bool with_incumbent : {false, true}) {
      std::optional<Move> incumbent;
      if (with_incumbent) {
        const auto& u = EnumerateUniverse();
        incumbent = u[rng.UniformInt(u.size())];
      }
      const auto moves = GenerateLegalMoves(hand, incumbent);
      int passes = 0;
      std::set<std::string> seen;
      for (std::size_t i = 0; i < moves.size(); ++i) {
        const Move& m = moves[i];
        EXPECT_TRUE(hand.Contains(m.cards));
        EXPECT_TRUE(seen.insert(m.cards.ToString()).second) << m.ToString();
        if (i > 0) {
          EXPECT_TRUE(CanonicalLess(moves[i - 1], m));
        }
        if (m.IsPass()) {
          ++passes;
          continue;
        }
        const auto c = Classify(m.cards);
        ASSERT_TRUE(c.has_value());
        EXPECT_EQ(c->category, m.category);
        EXPECT_EQ(c->main_rank, m.main_rank);
        EXPECT_EQ(c->chain_len, m.chain_len);
      }
      EXPECT_EQ(passes, with_incumbent ? 1 : 0);
    }
  }
}

TEST(UniverseTest, CountsMatchTemplates) {
  const auto& universe = EnumerateUniverse();
  const auto expected = oracle::TemplateUniverseCounts();
  std::array<std::uint64_t, kNumMoveCategories> got{};
  for (const Move& m : universe) ++got[static_cast<int>(m.category)];
  EXPECT_EQ(got, expected);
  EXPECT_EQ(got[static_cast<int>(MoveCategory::kRocket)], 1u);
  EXPECT_EQ(got[static_cast<int>(MoveCategory::kBomb)], 13u);
  EXPECT_EQ(universe.size(), 13550u);
  std::set<oracle::Signature> unique = Signatures(universe);
  EXPECT_EQ(unique.size(), universe.size());
}

TEST(UniverseTest, SupersetOfLeadingMoves) {
  const auto universe = Signatures(EnumerateUniverse());
  Rng rng(5);
  for (int t = 0; t < 100; ++t) {
    for (const Move& m : GenerateLegalMoves(RandomHand(rng, 20), std::nullopt)) {
      EXPECT_TRUE(universe.count(oracle::ToSignature(m)));
    }
  }
}

}  // namespace
}  // namespace ddz
