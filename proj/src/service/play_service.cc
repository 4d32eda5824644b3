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

#include "ddz/play_service.h"

#include <cstdio>
#include <utility>
#include <vector>

#include "ddz/coach.h"
#include "ddz/features.h"
#include "ddz/models.h"
#include "ddz/nn/serialize.h"
#include "ddz/opponent_model.h"
#include "ddz/trainer.h"

// After Eigen: <resolv.h> defines a _res macro.
#include <httplib.h>

namespace ddz {
namespace {

using nlohmann::json;
namespace fs = std::filesystem;

Reply Error(int status, const std::string& code, const std::string& message) {
  return {status, {{"error", {{"code", code}, {"message", message}}}}};
}

json MoveJson(const Move& m) {
  return {{"cards", m.IsPass() ? "" : m.cards.ToString()},
          {"category", std::string(CategoryName(m.category))},
          {"text", m.ToString()}};
}

json PositionMap(const std::function<json(Position)>& f) {
  json out = json::object();
  for (int i = 0; i < kNumPositions; ++i) {
    const auto p = static_cast<Position>(i);
    out[std::string(PositionName(p))] = f(p);
  }
  return out;
}

}  // namespace

ServiceModels ServiceModels::Load(const std::string& description) {
  ServiceModels m;
  if (description == "greedy" || description == "random") {
    m.bot = MakeAgent(description);
    return m;
  }
  fs::path dir = description;
  if (!fs::is_directory(dir)) {
    throw nn::CheckpointError("no checkpoint directory at " + description);
  }
  if (fs::exists(dir / "checkpoints")) dir = LatestCheckpoint(dir);
  PolicyNets nets = PolicyNets::Load(dir);
  if (fs::exists(dir / kCoachCheckpointName)) {
    m.coach = nn::LoadNetwork(dir / kCoachCheckpointName);
  }
  m.nets = nets;
  m.bot = std::make_unique<NetworkAgent>(std::move(nets), dir.string());
  return m;
}

json ObservationJson(const GameState& state, Position viewer,
                     const PolicyNets* nets) {
  json obs;
  obs["api_version"] = kApiVersion;
  obs["position"] = PositionName(viewer);
  obs["hand"] = state.Hand(viewer).ToString();
  obs["card_counts"] =
      PositionMap([&](Position p) { return state.Hand(p).Total(); });
  obs["played"] =
      PositionMap([&](Position p) { return state.Played(p).ToString(); });
  json history = json::array();
  for (const HistoryEntry& e : state.history()) {
    json entry = MoveJson(e.move);
    entry["position"] = PositionName(e.position);
    history.push_back(std::move(entry));
  }
  obs["history"] = std::move(history);
  obs["bombs_played"] = state.bombs_played();
  obs["terminal"] = state.IsTerminal();

  if (state.IsTerminal()) {
    obs["current_player"] = nullptr;
    obs["your_turn"] = false;
    obs["move_to_beat"] = nullptr;
    obs["legal_moves"] = json::array();
    obs["winner"] = PositionName(state.Winner());
    const Payoff wp = state.ComputePayoff(Metric::kWP);
    const Payoff adp = state.ComputePayoff(Metric::kADP);
    obs["payoff"] = {{"wp", PositionMap([&](Position p) { return wp[p]; })},
                     {"adp", PositionMap([&](Position p) { return adp[p]; })}};
  } else {
    const bool to_act = state.current_player() == viewer;
    obs["current_player"] = PositionName(state.current_player());
    obs["your_turn"] = to_act;
    const std::optional<Move> to_beat = state.MoveToBeat();
    obs["move_to_beat"] = to_beat ? MoveJson(*to_beat) : json(nullptr);
    json legal = json::array();
    if (to_act) {
      for (const Move& m : state.LegalActions()) legal.push_back(MoveJson(m));
    }
    obs["legal_moves"] = std::move(legal);
    obs["winner"] = nullptr;
    obs["payoff"] = nullptr;
  }

  json overlays = json::object();
  overlays["expected_hand"] = nullptr;
  if (nets != nullptr && nets->opponent_model && !state.IsTerminal()) {
    const HandPrediction prediction = PredictHand(
        nets->prediction[Index(viewer)], EncodeState(state, viewer).Flatten(),
        RecentMoves(state), ComputeLegalLabel(state, viewer));
    const auto expected = ExpectedHand(prediction);
    json ranks = json::object();
    for (int r = 0; r < kNumRanks; ++r) {
      ranks[std::string(1, RankChar(r))] = expected[r];
    }
    overlays["expected_hand"] = {
        {"advisory", true},
        {"target_position", PositionName(NextPosition(viewer))},
        {"ranks", std::move(ranks)}};
  }
  obs["overlays"] = std::move(overlays);
  return obs;
}

PlayService::PlayService(ServiceModels models, ServiceOptions options)
    : models_(std::move(models)),
      options_(options),
      id_rng_(std::random_device{}() ^ DeriveSeed(options.seed, 17)) {}

Reply PlayService::Health() const {
  return {200,
          {{"status", "ok"},
           {"version", kServiceVersion},
           {"api_version", kApiVersion},
           {"bot", models_.bot->Name()},
           {"opponent_model", models_.nets && models_.nets->opponent_model},
           {"coach", models_.coach.has_value()},
           {"sessions", session_count()}}};
}

std::string PlayService::NewId() {
  std::lock_guard<std::mutex> lock(id_mu_);
  char buf[33];
  std::snprintf(buf, sizeof(buf), "%016llx%016llx",
                static_cast<unsigned long long>(id_rng_()),
                static_cast<unsigned long long>(id_rng_()));
  return buf;
}

std::shared_ptr<PlayService::Session> PlayService::Find(
    const std::string& id) const {
  std::shared_lock<std::shared_mutex> lock(sessions_mu_);
  auto it = sessions_.find(id);
  return it == sessions_.end() ? nullptr : it->second;
}

json PlayService::Descriptor(const Session& s) const {
  json coach = nullptr;
  if (s.p_win) coach = {{"advisory", true}, {"p_win", *s.p_win}};
  return {{"id", s.id},
          {"human_position", PositionName(s.human)},
          {"seed", s.seed},
          {"bot", models_.bot->Name()},
          {"overlays", {{"coach", coach}}}};
}

json PlayService::Observation(const Session& s) const {
  return ObservationJson(s.state, s.human,
                         models_.nets ? &*models_.nets : nullptr);
}

json PlayService::PlayBots(Session& s) {
  json moves = json::array();
  while (!s.state.IsTerminal() && s.state.current_player() != s.human) {
    const Position p = s.state.current_player();
    const Move m = models_.bot->Act(s.state, s.rng);
    if (s.state.CheckMove(m)) {
      throw std::logic_error("bot produced an illegal move " + m.ToString());
    }
    s.state = s.state.Step(m);
    json entry = MoveJson(m);
    entry["position"] = PositionName(p);
    moves.push_back(std::move(entry));
  }
  return moves;
}

Reply PlayService::CreateSession(const json& request) {
  if (!request.is_object()) {
    return Error(400, "bad_request", "request body must be a JSON object");
  }
  Position human;
  try {
    human = ParsePosition(request.value("human_position", "landlord"));
  } catch (const std::exception& e) {
    return Error(400, "bad_position", e.what());
  }
  std::uint64_t seed;
  if (request.contains("seed")) {
    const json& v = request["seed"];
    if (!v.is_number_integer() || v.get<std::int64_t>() < 0) {
      return Error(400, "bad_seed", "seed must be a non-negative integer");
    }
    seed = request["seed"].get<std::uint64_t>();
  } else {
    std::lock_guard<std::mutex> lock(id_mu_);
    seed = DeriveSeed(options_.seed, next_seed_++);
  }
  Deal deal;
  if (request.contains("deal") && !request["deal"].is_null()) {
    try {
      if (!request["deal"].is_string()) {
        throw CardError("deal must be a string landlord|down|up");
      }
      deal = ParseDeal(request["deal"].get<std::string>());
    } catch (const std::exception& e) {
      return Error(400, "malformed_deal", e.what());
    }
  } else {
    deal = DealCards(seed);
  }
  auto s = std::make_shared<Session>(GameState::NewGame(deal));
  s->human = human;
  s->seed = seed;
  if (models_.coach) s->p_win = CoachPredict(*models_.coach, deal);
  s->id = NewId();
  s->rng = Rng(DeriveSeed(s->seed, 1));
  s->created = s->updated = Clock::now();
  json bot_moves = PlayBots(*s);
  Reply reply{201,
              {{"session", Descriptor(*s)},
               {"bot_moves", std::move(bot_moves)},
               {"observation", Observation(*s)}}};
  PurgeIdle(Clock::now());
  std::unique_lock<std::shared_mutex> lock(sessions_mu_);
  sessions_[s->id] = s;
  return reply;
}

Reply PlayService::GetSession(const std::string& id) const {
  auto s = Find(id);
  if (!s) return Error(404, "unknown_session", "no session " + id);
  std::shared_lock<std::shared_mutex> lock(s->mu);
  return {200, {{"session", Descriptor(*s)}, {"observation", Observation(*s)}}};
}

Reply PlayService::GetObservation(const std::string& id) const {
  auto s = Find(id);
  if (!s) return Error(404, "unknown_session", "no session " + id);
  std::shared_lock<std::shared_mutex> lock(s->mu);
  return {200, Observation(*s)};
}

Reply PlayService::SubmitMove(const std::string& id, const json& request) {
  auto s = Find(id);
  if (!s) return Error(404, "unknown_session", "no session " + id);
  std::unique_lock<std::shared_mutex> lock(s->mu, std::try_to_lock);
  if (!lock.owns_lock()) {
    return Error(409, "conflict", "another move is being processed");
  }
  if (!request.is_object() || !request.contains("move") ||
      !request["move"].is_string()) {
    return Error(400, "bad_request", "body must be {\"move\": \"<cards>\"}");
  }
  if (s->state.IsTerminal()) {
    return Error(409, "game_over", "the game has ended");
  }
  if (s->state.current_player() != s->human) {
    return Error(409, "out_of_turn", "it is not the human's turn");
  }
  Move move;
  try {
    move = ParseMove(request["move"].get<std::string>());
  } catch (const IllegalMoveError& e) {
    Reply r = Error(422, "illegal_move", e.what());
    r.body["error"]["rule"] = e.rule();
    return r;
  }
  if (auto failure = s->state.CheckMove(move)) {
    Reply r = Error(422, "illegal_move", "illegal move: " + *failure);
    r.body["error"]["rule"] = *failure;
    return r;
  }
  s->state = s->state.Step(move);
  json bot_moves = PlayBots(*s);
  s->updated = Clock::now();
  return {200,
          {{"accepted", MoveJson(move)},
           {"bot_moves", std::move(bot_moves)},
           {"observation", Observation(*s)}}};
}

Reply PlayService::DeleteSession(const std::string& id) {
  std::unique_lock<std::shared_mutex> lock(sessions_mu_);
  if (sessions_.erase(id) == 0) {
    return Error(404, "unknown_session", "no session " + id);
  }
  return {200, {{"deleted", id}}};
}

int PlayService::PurgeIdle(Clock::time_point now) {
  std::unique_lock<std::shared_mutex> lock(sessions_mu_);
  int purged = 0;
  for (auto it = sessions_.begin(); it != sessions_.end();) {
    std::shared_lock<std::shared_mutex> session_lock(it->second->mu,
                                                     std::try_to_lock);
    if (session_lock.owns_lock() &&
        now - it->second->updated > options_.idle_timeout) {
      session_lock.unlock();
      it = sessions_.erase(it);
      ++purged;
    } else {
      ++it;
    }
  }
  return purged;
}

int PlayService::session_count() const {
  std::shared_lock<std::shared_mutex> lock(sessions_mu_);
  return static_cast<int>(sessions_.size());
}

std::optional<GameState> PlayService::StateForTesting(
    const std::string& id) const {
  auto s = Find(id);
  if (!s) return std::nullopt;
  std::shared_lock<std::shared_mutex> lock(s->mu);
  return s->state;
}

void InstallRoutes(httplib::Server& server, PlayService& service) {
  auto send = [](httplib::Response& res, const Reply& reply) {
    res.status = reply.status;
    res.set_content(reply.body.dump(), "application/json");
  };
  auto parse = [](const httplib::Request& req) {
    return req.body.empty() ? json::object()
                            : json::parse(req.body, nullptr, false);
  };
  const std::string session = R"(/api/v1/sessions/([0-9a-f]+))";

  server.Get("/api/v1/health",
             [&service, send](const httplib::Request&, httplib::Response& res) {
               send(res, service.Health());
             });
  server.Post(
      "/api/v1/sessions", [&service, send, parse](const httplib::Request& req,
                                                  httplib::Response& res) {
        const json body = parse(req);
        send(res, body.is_discarded()
                      ? Error(400, "bad_request", "body is not valid JSON")
                      : service.CreateSession(body));
      });
  server.Get(session, [&service, send](const httplib::Request& req,
                                       httplib::Response& res) {
    send(res, service.GetSession(req.matches[1]));
  });
  server.Get(
      session + "/observation",
      [&service, send](const httplib::Request& req, httplib::Response& res) {
        send(res, service.GetObservation(req.matches[1]));
      });
  server.Post(
      session + "/moves", [&service, send, parse](const httplib::Request& req,
                                                  httplib::Response& res) {
        const json body = parse(req);
        send(res, body.is_discarded()
                      ? Error(400, "bad_request", "body is not valid JSON")
                      : service.SubmitMove(req.matches[1], body));
      });
  server.Delete(session, [&service, send](const httplib::Request& req,
                                          httplib::Response& res) {
    send(res, service.DeleteSession(req.matches[1]));
  });
  server.set_exception_handler([send](const httplib::Request&,
                                      httplib::Response& res,
                                      std::exception_ptr ep) {
    std::string what = "internal error";
    try {
      std::rethrow_exception(ep);
    } catch (const std::exception& e) {
      what = e.what();
    } catch (...) {
    }
    send(res, Error(500, "internal", what));
  });
  server.set_error_handler(
      [send](const httplib::Request&, httplib::Response& res) {
        if (res.body.empty()) {
          send(res, Error(res.status, "not_found", "no such endpoint"));
        }
      });
}

}  // namespace ddz
