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

#ifndef DDZ_CARDS_H_
#define DDZ_CARDS_H_

#include <array>
#include <cstdint>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace ddz {

// Ranks are indices 0..14 in game order: 3 4 5 6 7 8 9 T J Q K A 2 B R.
// B is the Black Joker and R the Red Joker.
inline constexpr int kNumRanks = 15;
inline constexpr int kRankTwo = 12;
inline constexpr int kRankAce = 11;
inline constexpr int kBlackJoker = 13;
inline constexpr int kRedJoker = 14;
inline constexpr int kDeckSize = 54;
inline constexpr int kLandlordHandSize = 20;
inline constexpr int kPeasantHandSize = 17;
inline constexpr std::string_view kRankChars = "3456789TJQKA2BR";

constexpr int RankMax(int rank) { return rank >= kBlackJoker ? 1 : 4; }
char RankChar(int rank);
// Returns -1 for characters outside the rank alphabet.
int RankFromChar(char c);

class CardError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// A file could not be opened, read, or written.
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A multiset of ranks. Suits never matter in this game.
class CardSet {
 public:
  CardSet() { counts_.fill(0); }

  static CardSet FullDeck();
  static CardSet FromCounts(const std::array<int, kNumRanks>& counts);

  int Count(int rank) const { return counts_[rank]; }
  int Total() const;
  bool Empty() const { return Total() == 0; }
  const std::array<std::uint8_t, kNumRanks>& counts() const { return counts_; }

  // Adds n copies; throws CardError if a rank would exceed its maximum.
  void Add(int rank, int n = 1);
  // Removes n copies; throws CardError if not enough copies are present.
  void Remove(int rank, int n = 1);

  bool Contains(const CardSet& other) const;
  CardSet& operator+=(const CardSet& other);
  CardSet& operator-=(const CardSet& other);
  friend CardSet operator+(CardSet a, const CardSet& b) { return a += b; }
  friend CardSet operator-(CardSet a, const CardSet& b) { return a -= b; }
  friend bool operator==(const CardSet&, const CardSet&) = default;
  friend auto operator<=>(const CardSet&, const CardSet&) = default;

  // Ranks in ascending order with repetition, e.g. "33JBR".
  std::string ToString() const;
  // Flat list of rank indices in ascending order.
  std::vector<int> Ranks() const;

 private:
  std::array<std::uint8_t, kNumRanks> counts_;
};

std::ostream& operator<<(std::ostream& os, const CardSet& cards);

// Parses a rank-string such as "3455677789JQKAAAA22R". Character order is
// irrelevant. Throws CardError on unknown characters or over-full ranks.
CardSet ParseCards(std::string_view text);

struct Deal {
  CardSet landlord;  // 20 cards, bottom cards included
  CardSet down;      // plays after the Landlord
  CardSet up;        // plays before the Landlord

  friend bool operator==(const Deal&, const Deal&) = default;
};

// Throws CardError unless the three hands partition the deck 20/17/17.
void ValidateDeal(const Deal& deal);

// "landlord|down|up" rank-strings.
std::string FormatDeal(const Deal& deal);
Deal ParseDeal(std::string_view line);

// Fisher-Yates shuffle of the 54 card slots driven by ddz::Rng (mt19937_64)
// seeded with `seed`; the first 20 slots go to the Landlord, then 17 and 17.
Deal DealCards(std::uint64_t seed);

// Deck files hold one deal per line. Blank lines and '#' comments are skipped.
std::vector<Deal> ReadDeckFile(const std::string& path);
void WriteDeckFile(const std::string& path, const std::vector<Deal>& deals);

}  // namespace ddz

#endif  // DDZ_CARDS_H_
