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

#ifndef DDZ_GAME_H_
#define DDZ_GAME_H_

#include <array>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "ddz/cards.h"
#include "ddz/moves.h"

namespace ddz {

// Turn order is Landlord -> LandlordDown -> LandlordUp -> Landlord.
enum class Position { kLandlord = 0, kLandlordDown = 1, kLandlordUp = 2 };
inline constexpr int kNumPositions = 3;
inline constexpr std::array<Position, kNumPositions> kAllPositions = {
    Position::kLandlord, Position::kLandlordDown, Position::kLandlordUp};

inline int Index(Position p) { return static_cast<int>(p); }
inline Position NextPosition(Position p) {
  return static_cast<Position>((Index(p) + 1) % kNumPositions);
}
inline bool IsPeasant(Position p) { return p != Position::kLandlord; }
// "landlord", "landlord_down", "landlord_up".
std::string_view PositionName(Position p);
Position ParsePosition(std::string_view name);

enum class Metric { kWP, kADP };
std::string_view MetricName(Metric m);
Metric ParseMetric(std::string_view name);

class IllegalMoveError : public std::invalid_argument {
 public:
  IllegalMoveError(const std::string& rule)
      : std::invalid_argument("illegal move: " + rule), rule_(rule) {}
  const std::string& rule() const { return rule_; }

 private:
  std::string rule_;
};

class GameStateError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

struct HistoryEntry {
  Position position;
  Move move;
  friend bool operator==(const HistoryEntry&, const HistoryEntry&) = default;
};

struct Payoff {
  Metric metric = Metric::kWP;
  std::array<double, kNumPositions> score{};
  double operator[](Position p) const { return score[Index(p)]; }
};

// Immutable game value. Step() returns the successor state.
class GameState {
 public:
  // Throws CardError if the deal does not partition the deck.
  static GameState NewGame(const Deal& deal);

  const Deal& deal() const { return deal_; }
  const CardSet& Hand(Position p) const { return hands_[Index(p)]; }
  const std::vector<HistoryEntry>& history() const { return history_; }
  Position current_player() const { return current_; }
  // Last non-Pass move of the open trick and its owner, if any.
  const std::optional<HistoryEntry>& trick_incumbent() const {
    return incumbent_;
  }
  int bombs_played() const { return bombs_; }
  // Cards played so far by one position.
  const CardSet& Played(Position p) const { return played_[Index(p)]; }

  bool IsTerminal() const { return winner_.has_value(); }
  // The position that emptied its hand. Throws GameStateError if running.
  Position Winner() const;

  // The move the current player must beat, or nullopt when leading.
  std::optional<Move> MoveToBeat() const;
  std::vector<Move> LegalActions() const;
  // The violated rule for `move` in this state, or nullopt if legal.
  std::optional<std::string> CheckMove(const Move& move) const;

  // Throws IllegalMoveError (naming the rule), or GameStateError when the
  // game is over.
  GameState Step(const Move& move) const;
  // Parses "pass"/"" or a rank-string, classifies it, then steps.
  GameState StepText(std::string_view text) const;

  Payoff ComputePayoff(Metric metric) const;

  friend bool operator==(const GameState&, const GameState&) = default;

 private:
  GameState() = default;

  Deal deal_;
  std::array<CardSet, kNumPositions> hands_;
  std::array<CardSet, kNumPositions> played_;
  std::vector<HistoryEntry> history_;
  Position current_ = Position::kLandlord;
  std::optional<HistoryEntry> incumbent_;
  int bombs_ = 0;
  std::optional<Position> winner_;
};

// Parses a user-facing move string ("pass" or a rank-string). Throws
// IllegalMoveError if the cards form no legal combination.
Move ParseMove(std::string_view text);

// Game logs: a deal line followed by "position:move" lines and a blank line.
void WriteGameLog(std::ostream& os, const GameState& state);
// Reads one record and replays it; nullopt at end of stream.
std::optional<GameState> ReadGameLog(std::istream& is);
GameState Replay(const Deal& deal, const std::vector<HistoryEntry>& history);

}  // namespace ddz

#endif  // DDZ_GAME_H_
