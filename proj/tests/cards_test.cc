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

#include "ddz/cards.h"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>

#include <gtest/gtest.h>

#include "ddz/rng.h"

namespace ddz {
namespace {

TEST(ParseCardsTest, TableCaseOneLandlordHand) {
  const CardSet hand = ParseCards("3455677789JQKAAAA22R");
  EXPECT_EQ(hand.Total(), 20);
  EXPECT_EQ(hand.Count(RankFromChar('5')), 2);
  EXPECT_EQ(hand.Count(RankFromChar('7')), 3);
  EXPECT_EQ(hand.Count(kRankAce), 4);
  EXPECT_EQ(hand.Count(kRankTwo), 2);
  EXPECT_EQ(hand.Count(kRedJoker), 1);
  EXPECT_EQ(hand.Count(kBlackJoker), 0);
  EXPECT_EQ(hand.ToString(), "3455677789JQKAAAA22R");
}

TEST(ParseCardsTest, EmptyAndErrors) {
  EXPECT_EQ(ParseCards("").Total(), 0);
  EXPECT_THROW(ParseCards("33333"), CardError);
  EXPECT_THROW(ParseCards("BB"), CardError);
  EXPECT_THROW(ParseCards("3x"), CardError);
  EXPECT_THROW(ParseCards("10"), CardError);
}

TEST(ParseCardsTest, FormattingIsCanonicalAscending) {
  EXPECT_EQ(ParseCards("R2A3").ToString(), "3A2R");
  Rng rng(11);
  for (int i = 0; i < 500; ++i) {
    CardSet c;
    for (int r = 0; r < kNumRanks; ++r) {
      c.Add(r, static_cast<int>(rng.UniformInt(RankMax(r) + 1)));
    }
    EXPECT_EQ(ParseCards(c.ToString()), c);
  }
}

TEST(CardSetTest, Arithmetic) {
  const CardSet a = ParseCards("3345");
  const CardSet b = ParseCards("35");
  EXPECT_TRUE(a.Contains(b));
  EXPECT_FALSE(b.Contains(a));
  EXPECT_EQ((a - b).ToString(), "34");
  EXPECT_EQ((a + b).ToString(), "333455");
  EXPECT_THROW(b - a, CardError);
  EXPECT_EQ(CardSet::FullDeck().Total(), kDeckSize);
}

TEST(DealTest, PartitionAndDeterminism) {
  for (std::uint64_t seed = 0; seed < 200; ++seed) {
    const Deal d = DealCards(seed);
    EXPECT_EQ(d.landlord.Total(), 20);
    EXPECT_EQ(d.down.Total(), 17);
    EXPECT_EQ(d.up.Total(), 17);
    EXPECT_EQ(d.landlord + d.down + d.up, CardSet::FullDeck());
    EXPECT_EQ(DealCards(seed), d);
  }
  EXPECT_NE(DealCards(1), DealCards(2));
}

double HypergeometricPmf(int k, int copies) {
  // P(landlord holds k of `copies`) when drawing 20 of 54.
  auto log_choose = [](int n, int r) {
    return std::lgamma(n + 1.0) - std::lgamma(r + 1.0) -
           std::lgamma(n - r + 1.0);
  };
  if (k > copies || 20 - k > 54 - copies) return 0.0;
  return std::exp(log_choose(copies, k) + log_choose(54 - copies, 20 - k) -
                  log_choose(54, 20));
}

TEST(DealTest, LandlordCountsFollowHypergeometric) {
  constexpr int kDeals = 10000;
  std::array<std::array<int, 5>, kNumRanks> hist{};
  for (int seed = 0; seed < kDeals; ++seed) {
    const Deal d = DealCards(static_cast<std::uint64_t>(seed));
    for (int r = 0; r < kNumRanks; ++r) ++hist[r][d.landlord.Count(r)];
  }
  // Per-rank means near 20/54 of the copies.
  for (int r = 0; r < kNumRanks; ++r) {
    double mean = 0;
    for (int k = 0; k <= 4; ++k) mean += k * hist[r][k];
    mean /= kDeals;
    EXPECT_NEAR(mean, 20.0 / 54.0 * RankMax(r), 0.05) << RankChar(r);
  }
  // Pooled chi-square over the 13 four-copy ranks, df = 4.
  std::array<double, 5> pooled{};
  for (int r = 0; r < 13; ++r) {
    for (int k = 0; k <= 4; ++k) pooled[k] += hist[r][k];
  }
  double chi2 = 0;
  for (int k = 0; k <= 4; ++k) {
    const double expected = HypergeometricPmf(k, 4) * 13 * kDeals;
    chi2 += (pooled[k] - expected) * (pooled[k] - expected) / expected;
  }
  EXPECT_LT(chi2, 13.277);  // chi2_{0.99}(4)
  // Each joker: Bernoulli(20/54), df = 1.
  for (int r : {kBlackJoker, kRedJoker}) {
    double c = 0;
    for (int k = 0; k <= 1; ++k) {
      const double expected = HypergeometricPmf(k, 1) * kDeals;
      c += (hist[r][k] - expected) * (hist[r][k] - expected) / expected;
    }
    EXPECT_LT(c, 6.635);  // chi2_{0.99}(1)
  }
}

TEST(DealTest, ParseAndValidate) {
  const Deal table_case_one =
      ParseDeal("3455677789JQKAAAA22R|334569TTTJJQQQKK2|344566788899TJK2B");
  EXPECT_EQ(table_case_one.landlord.Total(), 20);
  EXPECT_THROW(ParseDeal("333|444|555"), CardError);
  EXPECT_THROW(ParseDeal("no bars"), CardError);
  // Duplicate card: the red joker appears twice.
  EXPECT_THROW(
      ParseDeal("3455677789JQKAAAA22R|334569TTTJJQQQKK2|344566788899TJK2R"),
      CardError);
  const Deal d = DealCards(5);
  EXPECT_EQ(ParseDeal(FormatDeal(d)), d);
}

TEST(DeckFileTest, RoundTrip) {
  const auto path =
      std::filesystem::temp_directory_path() / "ddz_cards_test_decks.txt";
  std::vector<Deal> deals;
  for (int i = 0; i < 5; ++i) deals.push_back(DealCards(100 + i));
  WriteDeckFile(path.string(), deals);
  EXPECT_EQ(ReadDeckFile(path.string()), deals);
  {
    std::ofstream out(path, std::ios::app);
    out << "# comment\n\nbad|line|here\n";
  }
  EXPECT_THROW(ReadDeckFile(path.string()), CardError);
  std::filesystem::remove(path);
  EXPECT_THROW(ReadDeckFile(path.string()), std::runtime_error);
}

}  // namespace
}  // namespace ddz
