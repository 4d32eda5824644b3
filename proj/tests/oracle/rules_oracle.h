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

// Test-only rules oracle. It shares no code with the move generator or the
// library classifier: moves are found by brute-force sub-multiset
// enumeration and each candidate is matched against explicit per-category
// decompositions.

#ifndef DDZ_TESTS_ORACLE_RULES_ORACLE_H_
#define DDZ_TESTS_ORACLE_RULES_ORACLE_H_

#include <array>
#include <cstdint>
#include <optional>
#include <set>
#include <string>
#include <tuple>
#include <vector>

#include "ddz/cards.h"
#include "ddz/moves.h"

namespace ddz::oracle {

using Counts = std::array<int, 15>;

// (category, main rank, chain length, rank-string of cards)
using Signature = std::tuple<int, int, int, std::string>;

inline std::string CountsToString(const Counts& c) {
  static const char* kChars = "3456789TJQKA2BR";
  std::string s;
  for (int r = 0; r < 15; ++r) s.append(c[r], kChars[r]);
  return s;
}

inline int Sum(const Counts& c) {
  int n = 0;
  for (int v : c) n += v;
  return n;
}

struct Shape {
  MoveCategory category;
  int main_rank;
  int chain_len;
};

// All readings of the exact multiset `c` as a single move.
inline std::vector<Shape> OracleClassify(const Counts& c) {
  using C = MoveCategory;
  std::vector<Shape> out;
  const int n = Sum(c);
  if (n == 0 || n > 20) return out;

  auto only = [&](const Counts& want) { return want == c; };
  auto single = [&](int r, int k) {
    Counts w{};
    w[r] = k;
    return w;
  };

  for (int r = 0; r < 15; ++r) {
    if (only(single(r, 1))) out.push_back({C::kSolo, r, 0});
  }
  for (int r = 0; r < 13; ++r) {
    if (only(single(r, 2))) out.push_back({C::kPair, r, 0});
    if (only(single(r, 3))) out.push_back({C::kTrio, r, 0});
    if (only(single(r, 4))) out.push_back({C::kBomb, r, 0});
  }
  {
    Counts w{};
    w[13] = w[14] = 1;
    if (only(w)) out.push_back({C::kRocket, -1, 0});
  }

  // Principal rank(s) removed, the rest must be exactly the kickers.
  for (int t = 0; t < 13; ++t) {
    if (c[t] >= 3) {
      Counts rest = c;
      rest[t] -= 3;
      for (int k = 0; k < 15; ++k) {
        if (k != t && rest == single(k, 1)) out.push_back({C::kTrioSolo, t, 0});
        if (k != t && k < 13 && rest == single(k, 2)) {
          out.push_back({C::kTrioPair, t, 0});
        }
      }
    }
    if (c[t] == 4) {
      Counts rest = c;
      rest[t] = 0;
      for (int a = 0; a < 15; ++a) {
        for (int b = a + 1; b < 15; ++b) {
          if (a == t || b == t) continue;
          Counts w{};
          w[a] = w[b] = 1;
          if (rest == w) out.push_back({C::kQuadTwoSolo, t, 0});
          if (a < 13 && b < 13) {
            w[a] = w[b] = 2;
            if (rest == w) out.push_back({C::kQuadTwoPair, t, 0});
          }
        }
      }
    }
  }

  for (int start = 0; start < 12; ++start) {
    for (int len = 1; start + len - 1 <= 11; ++len) {
      const int top = start + len - 1;
      for (int width = 1; width <= 3; ++width) {
        Counts w{};
        for (int r = start; r <= top; ++r) w[r] = width;
        if (only(w)) {
          if (width == 1 && len >= 5) out.push_back({C::kChainSolo, top, len});
          if (width == 2 && len >= 3) out.push_back({C::kChainPair, top, len});
          if (width == 3 && len >= 2) out.push_back({C::kChainTrio, top, len});
        }
      }
      if (len < 2) continue;
      bool trios = true;
      for (int r = start; r <= top; ++r) trios = trios && c[r] >= 3;
      if (!trios) continue;
      Counts rest = c;
      for (int r = start; r <= top; ++r) rest[r] -= 3;
      bool solos = Sum(rest) == len;
      bool pairs = Sum(rest) == 2 * len;
      for (int r = 0; r < 15; ++r) {
        const bool in_chain = r >= start && r <= top;
        if (rest[r] == 0) continue;
        if (in_chain || rest[r] != 1) solos = false;
        if (in_chain || rest[r] != 2 || r >= 13) pairs = false;
      }
      if (solos) out.push_back({C::kPlaneSolo, top, len});
      if (pairs) out.push_back({C::kPlanePair, top, len});
    }
  }
  return out;
}

inline bool OracleBeats(const Shape& a, const Shape& b) {
  using C = MoveCategory;
  if (b.category == C::kPass) return true;
  if (b.category == C::kRocket) return false;
  if (a.category == C::kRocket) return true;
  if (a.category == C::kBomb) {
    return b.category != C::kBomb || a.main_rank > b.main_rank;
  }
  if (b.category == C::kBomb) return false;
  return a.category == b.category && a.chain_len == b.chain_len &&
         a.main_rank > b.main_rank;
}

// Brute-force legal move set: every sub-multiset of the hand, classified,
// filtered against the incumbent.
inline std::set<Signature> OracleLegalMoves(const Counts& hand,
                                            const std::optional<Shape>& inc) {
  std::set<Signature> out;
  Counts sub{};
  // Odometer over per-rank counts 0..hand[r].
  while (true) {
    for (const Shape& s : OracleClassify(sub)) {
      if (!inc || OracleBeats(s, *inc)) {
        out.insert({static_cast<int>(s.category), s.main_rank, s.chain_len,
                    CountsToString(sub)});
      }
    }
    int r = 0;
    while (r < 15 && sub[r] == hand[r]) sub[r++] = 0;
    if (r == 15) break;
    ++sub[r];
  }
  if (inc) out.insert({static_cast<int>(MoveCategory::kPass), -1, 0, ""});
  return out;
}

inline Counts ToOracleCounts(const CardSet& cards) {
  Counts c{};
  for (int r = 0; r < 15; ++r) c[r] = cards.Count(r);
  return c;
}

inline Signature ToSignature(const Move& m) {
  return {static_cast<int>(m.category), m.main_rank, m.chain_len,
          m.IsPass() ? std::string() : m.cards.ToString()};
}

inline std::uint64_t Binomial(int n, int k) {
  if (k < 0 || k > n) return 0;
  std::uint64_t r = 1;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

// Closed-form count of every non-Pass move of at most 20 cards.
inline std::array<std::uint64_t, 15> TemplateUniverseCounts() {
  using C = MoveCategory;
  std::array<std::uint64_t, 15> n{};
  auto at = [&](C c) -> std::uint64_t& { return n[static_cast<int>(c)]; };
  at(C::kSolo) = 15;
  at(C::kPair) = 13;
  at(C::kTrio) = 13;
  at(C::kBomb) = 13;
  at(C::kRocket) = 1;
  at(C::kTrioSolo) = 13 * 14;  // any other rank incl. jokers
  at(C::kTrioPair) = 13 * 12;
  at(C::kQuadTwoSolo) = 13 * Binomial(14, 2);
  at(C::kQuadTwoPair) = 13 * Binomial(12, 2);
  // 12 chainable ranks (3..A): 12 - len + 1 windows of each length.
  for (int len = 5; len <= 12; ++len) at(C::kChainSolo) += 13 - len;
  for (int len = 3; 2 * len <= 20; ++len) at(C::kChainPair) += 13 - len;
  for (int len = 2; 3 * len <= 20; ++len) at(C::kChainTrio) += 13 - len;
  for (int len = 2; 4 * len <= 20; ++len) {
    at(C::kPlaneSolo) += (13 - len) * Binomial(15 - len, len);
  }
  for (int len = 2; 5 * len <= 20; ++len) {
    at(C::kPlanePair) += (13 - len) * Binomial(13 - len, len);
  }
  return n;
}

}  // namespace ddz::oracle

#endif  // DDZ_TESTS_ORACLE_RULES_ORACLE_H_
