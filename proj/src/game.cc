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

#include "ddz/game.h"

#include <cmath>
#include <istream>
#include <ostream>

namespace ddz {

std::string_view PositionName(Position p) {
  switch (p) {
    case Position::kLandlord:
      return "landlord";
    case Position::kLandlordDown:
      return "landlord_down";
    case Position::kLandlordUp:
      return "landlord_up";
  }
  return "?";
}

Position ParsePosition(std::string_view name) {
  for (Position p : kAllPositions) {
    if (PositionName(p) == name) return p;
  }
  throw std::invalid_argument("unknown position '" + std::string(name) + "'");
}

std::string_view MetricName(Metric m) { return m == Metric::kWP ? "wp" : "adp"; }

Metric ParseMetric(std::string_view name) {
  if (name == "wp" || name == "WP") return Metric::kWP;
  if (name == "adp" || name == "ADP") return Metric::kADP;
  throw std::invalid_argument("unknown metric '" + std::string(name) + "'");
}

GameState GameState::NewGame(const Deal& deal) {
  ValidateDeal(deal);
  GameState s;
  s.deal_ = deal;
  s.hands_ = {deal.landlord, deal.down, deal.up};
  return s;
}

Position GameState::Winner() const {
  if (!winner_) throw GameStateError("game is not finished");
  return *winner_;
}

std::optional<Move> GameState::MoveToBeat() const {
  if (incumbent_ && incumbent_->position != current_) return incumbent_->move;
  return std::nullopt;
}

std::vector<Move> GameState::LegalActions() const {
  if (IsTerminal()) throw GameStateError("game is over");
  return GenerateLegalMoves(Hand(current_), MoveToBeat());
}

std::optional<std::string> GameState::CheckMove(const Move& move) const {
  if (IsTerminal()) return "game over";
  const std::optional<Move> to_beat = MoveToBeat();
  if (move.IsPass()) {
    if (!to_beat) return "cannot pass when leading";
    if (!move.cards.Empty()) return "pass carries no cards";
    return std::nullopt;
  }
  if (!Hand(current_).Contains(move.cards)) return "cards not in hand";
  const std::optional<Move> classified = Classify(move.cards);
  if (!classified || classified->IsPass()) return "not a valid combination";
  if (classified->category != move.category ||
      classified->main_rank != move.main_rank ||
      classified->chain_len != move.chain_len) {
    return "move does not match its cards";
  }
  if (to_beat) return BeatFailure(move, *to_beat);
  return std::nullopt;
}

GameState GameState::Step(const Move& move) const {
  if (IsTerminal()) throw GameStateError("game is over");
  if (auto failure = CheckMove(move)) throw IllegalMoveError(*failure);
  GameState next = *this;
  const Position mover = current_;
  next.history_.push_back({mover, move});
  if (!move.IsPass()) {
    next.hands_[Index(mover)] -= move.cards;
    next.played_[Index(mover)] += move.cards;
    next.incumbent_ = HistoryEntry{mover, move};
    if (move.IsBombLike()) ++next.bombs_;
    if (next.hands_[Index(mover)].Empty()) {
      next.winner_ = mover;
      return next;
    }
  }
  next.current_ = NextPosition(mover);
  // Two passes in a row hand the lead back to the incumbent's owner.
  if (next.incumbent_ && next.incumbent_->position == next.current_) {
    next.incumbent_.reset();
  }
  return next;
}

GameState GameState::StepText(std::string_view text) const {
  return Step(ParseMove(text));
}

Payoff GameState::ComputePayoff(Metric metric) const {
  const Position winner = Winner();
  const double magnitude =
      metric == Metric::kWP ? 1.0 : std::ldexp(1.0, bombs_);
  const double landlord = IsPeasant(winner) ? -magnitude : magnitude;
  Payoff payoff;
  payoff.metric = metric;
  payoff.score = {landlord, -landlord, -landlord};
  return payoff;
}

Move ParseMove(std::string_view text) {
  if (text.empty() || text == "pass" || text == "PASS" || text == "Pass") {
    return Move::Pass();
  }
  CardSet cards;
  try {
    cards = ParseCards(text);
  } catch (const CardError& e) {
    throw IllegalMoveError(e.what());
  }
  std::optional<Move> move = Classify(cards);
  if (!move) throw IllegalMoveError("not a valid combination");
  return *move;
}

void WriteGameLog(std::ostream& os, const GameState& state) {
  os << FormatDeal(state.deal()) << '\n';
  for (const HistoryEntry& e : state.history()) {
    os << PositionName(e.position) << ':' << e.move.ToString() << '\n';
  }
  os << '\n';
}

std::optional<GameState> ReadGameLog(std::istream& is) {
  std::string line;
  while (std::getline(is, line) && line.empty()) {
  }
  if (line.empty()) return std::nullopt;
  GameState state = GameState::NewGame(ParseDeal(line));
  while (std::getline(is, line) && !line.empty()) {
    const auto colon = line.find(':');
    if (colon == std::string::npos) {
      throw std::invalid_argument("malformed game log line: " + line);
    }
    const Position p = ParsePosition(std::string_view(line).substr(0, colon));
    if (p != state.current_player()) {
      throw std::invalid_argument("game log out of turn: " + line);
    }
    state = state.StepText(std::string_view(line).substr(colon + 1));
  }
  return state;
}

GameState Replay(const Deal& deal, const std::vector<HistoryEntry>& history) {
  GameState state = GameState::NewGame(deal);
  for (const HistoryEntry& e : history) {
    if (e.position != state.current_player()) {
      throw std::invalid_argument("history out of turn");
    }
    state = state.Step(e.move);
  }
  return state;
}

}  // namespace ddz
