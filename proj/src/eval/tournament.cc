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


#include <cmath>
#include <ostream>
#include <stdexcept>
#include <thread>

#include <nlohmann/json.hpp>

#include "ddz/eval.h"

namespace ddz {

GameResult PlayGame(const Deal& deal, const Agent& landlord,
                    const Agent& peasants, Rng& rng) {
  GameState s = GameState::NewGame(deal);
  while (!s.IsTerminal()) {
    const Agent& agent =
        IsPeasant(s.current_player()) ? peasants : landlord;
    const Move m = agent.Act(s, rng);
    if (const auto rule = s.CheckMove(m)) {
      throw std::logic_error(agent.Name() + " chose an illegal move: " + *rule);
    }
    s = s.Step(m);
  }
  GameResult r;
  r.winner = s.Winner();
  r.bombs = s.bombs_played();
  r.landlord_points = s.ComputePayoff(Metric::kADP)[Position::kLandlord];
  return r;
}

int PairResult::a_wins() const {
  return (a_landlord.LandlordWon() ? 1 : 0) + (b_landlord.LandlordWon() ? 0 : 1);
}

double PairResult::a_points() const {
  return a_landlord.landlord_points - b_landlord.landlord_points;
}

PairResult PairedPlay(const Deal& deal, const Agent& a, const Agent& b,
                      std::uint64_t seed) {
  ValidateDeal(deal);
  PairResult r;
  // Both games share the seed, so identical policies replay identically.
  Rng first(seed);
  r.a_landlord = PlayGame(deal, a, b, first);
  Rng second(seed);
  r.b_landlord = PlayGame(deal, b, a, second);
  return r;
}

TournamentReport RunTournament(const Agent& a, const Agent& b,
                               const std::vector<Deal>& decks, Metric metric,
                               std::uint64_t seed, int workers) {
  if (decks.empty()) throw std::invalid_argument("tournament needs a deck");
  TournamentReport report;
  report.agent_a = a.Name();
  report.agent_b = b.Name();
  report.metric = metric;
  report.seed = seed;
  report.decks = decks;
  report.pairs.resize(decks.size());
  const int n = static_cast<int>(decks.size());
  workers = std::clamp(workers, 1, n);
  auto work = [&](int w) {
    for (int i = w; i < n; i += workers) {
      report.pairs[i] = PairedPlay(decks[i], a, b, DeriveSeed(seed, i));
    }
  };
  if (workers == 1) {
    work(0);
  } else {
    std::vector<std::thread> threads;
    for (int w = 0; w < workers; ++w) threads.emplace_back(work, w);
    for (std::thread& t : threads) t.join();
  }

  double points = 0;
  int a_ll = 0, b_ll = 0;
  for (const PairResult& p : report.pairs) {
    report.wins_a += p.a_wins();
    points += p.a_points();
    a_ll += p.a_landlord.LandlordWon();
    b_ll += p.b_landlord.LandlordWon();
  }
  report.games = 2 * n;
  report.wp_a = static_cast<double>(report.wins_a) / report.games;
  report.wp_b = static_cast<double>(report.games - report.wins_a) / report.games;
  report.adp_a = points / report.games;
  report.adp_b = -report.adp_a;
  report.a_landlord_wp = static_cast<double>(a_ll) / n;
  report.b_landlord_wp = static_cast<double>(b_ll) / n;
  report.landlord_side_wp = static_cast<double>(a_ll + b_ll) / report.games;
  return report;
}

std::vector<Deal> RandomDecks(int n, std::uint64_t seed) {
  std::vector<Deal> decks;
  decks.reserve(n);
  for (int i = 0; i < n; ++i) decks.push_back(DealCards(DeriveSeed(seed, i)));
  return decks;
}

void WriteReportTsv(std::ostream& os, const TournamentReport& report) {
  os << "deck\tdeal\ta_landlord_winner\ta_landlord_bombs\ta_landlord_points"
        "\tb_landlord_winner\tb_landlord_bombs\tb_landlord_points\ta_wins"
        "\ta_points\n";
  for (std::size_t i = 0; i < report.pairs.size(); ++i) {
    const PairResult& p = report.pairs[i];
    os << i << '\t' << FormatDeal(report.decks[i]) << '\t'
       << PositionName(p.a_landlord.winner) << '\t' << p.a_landlord.bombs
       << '\t' << p.a_landlord.landlord_points << '\t'
       << PositionName(p.b_landlord.winner) << '\t' << p.b_landlord.bombs
       << '\t' << p.b_landlord.landlord_points << '\t' << p.a_wins() << '\t'
       << p.a_points() << '\n';
  }
}

std::string ReportJson(const TournamentReport& r) {
  nlohmann::ordered_json j;
  j["agent_a"] = r.agent_a;
  j["agent_b"] = r.agent_b;
  j["metric"] = MetricName(r.metric);
  j["seed"] = r.seed;
  j["games"] = r.games;
  j["wins_a"] = r.wins_a;
  j["wp_a"] = r.wp_a;
  j["wp_b"] = r.wp_b;
  j["adp_a"] = r.adp_a;
  j["adp_b"] = r.adp_b;
  j["a_landlord_wp"] = r.a_landlord_wp;
  j["b_landlord_wp"] = r.b_landlord_wp;
  j["landlord_side_wp"] = r.landlord_side_wp;
  return j.dump(2);
}

}  // namespace ddz
