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

#include <fstream>
#include <numeric>
#include <ostream>
#include <utility>

#include "ddz/rng.h"

namespace ddz {

char RankChar(int rank) {
  if (rank < 0 || rank >= kNumRanks) throw CardError("rank out of range");
  return kRankChars[rank];
}

int RankFromChar(char c) {
  const auto pos = kRankChars.find(c);
  return pos == std::string_view::npos ? -1 : static_cast<int>(pos);
}

CardSet CardSet::FullDeck() {
  CardSet deck;
  for (int r = 0; r < kNumRanks; ++r) deck.counts_[r] = RankMax(r);
  return deck;
}

CardSet CardSet::FromCounts(const std::array<int, kNumRanks>& counts) {
  CardSet cards;
  for (int r = 0; r < kNumRanks; ++r) cards.Add(r, counts[r]);
  return cards;
}

int CardSet::Total() const {
  return std::accumulate(counts_.begin(), counts_.end(), 0);
}

void CardSet::Add(int rank, int n) {
  if (rank < 0 || rank >= kNumRanks) throw CardError("rank out of range");
  if (n < 0 || counts_[rank] + n > RankMax(rank)) {
    throw CardError(std::string("too many copies of rank ") + RankChar(rank));
  }
  counts_[rank] += n;
}

void CardSet::Remove(int rank, int n) {
  if (rank < 0 || rank >= kNumRanks) throw CardError("rank out of range");
  if (n < 0 || counts_[rank] < n) {
    throw CardError(std::string("not enough copies of rank ") +
                    RankChar(rank));
  }
  counts_[rank] -= n;
}

bool CardSet::Contains(const CardSet& other) const {
  for (int r = 0; r < kNumRanks; ++r) {
    if (other.counts_[r] > counts_[r]) return false;
  }
  return true;
}

CardSet& CardSet::operator+=(const CardSet& other) {
  for (int r = 0; r < kNumRanks; ++r) Add(r, other.counts_[r]);
  return *this;
}

CardSet& CardSet::operator-=(const CardSet& other) {
  for (int r = 0; r < kNumRanks; ++r) Remove(r, other.counts_[r]);
  return *this;
}

std::string CardSet::ToString() const {
  std::string out;
  for (int r = 0; r < kNumRanks; ++r) out.append(counts_[r], kRankChars[r]);
  return out;
}

std::vector<int> CardSet::Ranks() const {
  std::vector<int> out;
  for (int r = 0; r < kNumRanks; ++r) out.insert(out.end(), counts_[r], r);
  return out;
}

std::ostream& operator<<(std::ostream& os, const CardSet& cards) {
  return os << cards.ToString();
}

CardSet ParseCards(std::string_view text) {
  CardSet cards;
  for (char c : text) {
    const int rank = RankFromChar(c);
    if (rank < 0) {
      throw CardError(std::string("invalid card character '") + c + "'");
    }
    cards.Add(rank);
  }
  return cards;
}

void ValidateDeal(const Deal& deal) {
  if (deal.landlord.Total() != kLandlordHandSize) {
    throw CardError("landlord hand must hold 20 cards");
  }
  if (deal.down.Total() != kPeasantHandSize ||
      deal.up.Total() != kPeasantHandSize) {
    throw CardError("peasant hands must hold 17 cards");
  }
  CardSet all;
  try {
    all = deal.landlord + deal.down + deal.up;
  } catch (const CardError&) {
    throw CardError("deal hands overlap: a card appears twice");
  }
  if (all != CardSet::FullDeck()) {
    throw CardError("deal does not partition the deck");
  }
}

std::string FormatDeal(const Deal& deal) {
  return deal.landlord.ToString() + "|" + deal.down.ToString() + "|" +
         deal.up.ToString();
}

Deal ParseDeal(std::string_view line) {
  const auto a = line.find('|');
  const auto b = a == std::string_view::npos ? a : line.find('|', a + 1);
  if (b == std::string_view::npos || line.find('|', b + 1) != line.npos) {
    throw CardError("deal line must be 'landlord|down|up'");
  }
  Deal deal;
  deal.landlord = ParseCards(line.substr(0, a));
  deal.down = ParseCards(line.substr(a + 1, b - a - 1));
  deal.up = ParseCards(line.substr(b + 1));
  ValidateDeal(deal);
  return deal;
}

Deal DealCards(std::uint64_t seed) {
  std::array<int, kDeckSize> slots;
  int k = 0;
  for (int r = 0; r < kNumRanks; ++r) {
    for (int c = 0; c < RankMax(r); ++c) slots[k++] = r;
  }
  Rng rng(seed);
  for (int i = kDeckSize - 1; i > 0; --i) {
    const int j = static_cast<int>(rng.UniformInt(i + 1));
    std::swap(slots[i], slots[j]);
  }
  Deal deal;
  for (int i = 0; i < kDeckSize; ++i) {
    if (i < kLandlordHandSize) {
      deal.landlord.Add(slots[i]);
    } else if (i < kLandlordHandSize + kPeasantHandSize) {
      deal.down.Add(slots[i]);
    } else {
      deal.up.Add(slots[i]);
    }
  }
  return deal;
}

std::vector<Deal> ReadDeckFile(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open deck file " + path);
  std::vector<Deal> deals;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    try {
      deals.push_back(ParseDeal(line));
    } catch (const CardError& e) {
      throw CardError(path + ":" + std::to_string(line_no) + ": " + e.what());
    }
  }
  return deals;
}

void WriteDeckFile(const std::string& path, const std::vector<Deal>& deals) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw IoError("cannot write deck file " + path);
  for (const Deal& d : deals) out << FormatDeal(d) << '\n';
  out.flush();
  if (!out) throw IoError("write failed for deck file " + path);
}

}  // namespace ddz
