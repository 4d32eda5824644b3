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


#ifndef DDZ_EVAL_H_
#define DDZ_EVAL_H_

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <memory>
#include <string>
#include <vector>

#include "ddz/game.h"
#include "ddz/policy.h"
#include "ddz/rng.h"

namespace ddz {

// A policy that plays every position it is seated at.
class Agent {
 public:
  virtual ~Agent() = default;
  virtual std::string Name() const = 0;
  // Must return one of state.LegalActions().
  virtual Move Act(const GameState& state, Rng& rng) const = 0;
};

// Uniform over legal actions.
class RandomAgent : public Agent {
 public:
  std::string Name() const override { return "random"; }
  Move Act(const GameState& state, Rng& rng) const override;
};

// Hand-written baseline: finish when possible, otherwise shed the lowest
// ranks first, follow cheaply, never overtake a teammate, and keep bombs for
// opponents close to going out.
class GreedyRuleAgent : public Agent {
 public:
  std::string Name() const override { return "greedy"; }
  Move Act(const GameState& state, Rng& rng) const override;
};

// Greedy (argmax Q) play with trained networks.
class NetworkAgent : public Agent {
 public:
  NetworkAgent(PolicyNets nets, std::string name);
  std::string Name() const override { return name_; }
  Move Act(const GameState& state, Rng& rng) const override;
  const PolicyNets& nets() const { return nets_; }

 private:
  PolicyNets nets_;
  std::string name_;
};

// "random", "greedy", or a checkpoint directory.
std::unique_ptr<Agent> MakeAgent(const std::string& description);

struct GameResult {
  Position winner = Position::kLandlord;
  int bombs = 0;
  double landlord_points = 0.0;  // +-2^bombs
  bool LandlordWon() const { return winner == Position::kLandlord; }
};

// Plays one game from `deal` with `landlord` at the Landlord seat and
// `peasants` at both Peasant seats.
GameResult PlayGame(const Deal& deal, const Agent& landlord,
                    const Agent& peasants, Rng& rng);

struct PairResult {
  GameResult a_landlord;  // A as Landlord, B as both Peasants
  GameResult b_landlord;  // roles swapped, same deal
  int a_wins() const;
  double a_points() const;  // sum over both games of A's side points
};

PairResult PairedPlay(const Deal& deal, const Agent& a, const Agent& b,
                      std::uint64_t seed);

struct TournamentReport {
  std::string agent_a, agent_b;
  Metric metric = Metric::kADP;
  std::uint64_t seed = 0;
  int games = 0;
  int wins_a = 0;
  double wp_a = 0, wp_b = 0;
  double adp_a = 0, adp_b = 0;
  double a_landlord_wp = 0;   // A's win rate when seated as Landlord
  double b_landlord_wp = 0;   // B's win rate when seated as Landlord
  double landlord_side_wp = 0;  // Landlord-seat win rate over all games
  std::vector<Deal> decks;
  std::vector<PairResult> pairs;

  // The headline figure for `metric`.
  double Primary() const { return metric == Metric::kWP ? wp_a : adp_a; }
};

// Deck pairs may run on `workers` threads; the result does not depend on
// the worker count.
TournamentReport RunTournament(const Agent& a, const Agent& b,
                               const std::vector<Deal>& decks, Metric metric,
                               std::uint64_t seed, int workers = 1);

std::vector<Deal> RandomDecks(int n, std::uint64_t seed);

// One line per deck pair.
void WriteReportTsv(std::ostream& os, const TournamentReport& report);
std::string ReportJson(const TournamentReport& report);

}  // namespace ddz

#endif  // DDZ_EVAL_H_
