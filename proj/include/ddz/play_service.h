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

#ifndef DDZ_PLAY_SERVICE_H_
#define DDZ_PLAY_SERVICE_H_

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <nlohmann/json.hpp>
#include <optional>
#include <shared_mutex>
#include <string>

#include "ddz/eval.h"
#include "ddz/game.h"
#include "ddz/nn/network.h"
#include "ddz/rng.h"

namespace httplib {
class Server;
}

namespace ddz {

inline constexpr std::string_view kServiceVersion = "1.0.0";
inline constexpr std::string_view kApiVersion = "v1";

// A JSON reply with its HTTP status.
struct Reply {
  int status = 200;
  nlohmann::json body;
};

struct ServiceOptions {
  std::chrono::seconds idle_timeout{1800};
  std::uint64_t seed = 0;  // source of seeds for sessions created without one
};

// Bots and overlays shared by every session.
struct ServiceModels {
  std::unique_ptr<Agent> bot;
  std::optional<PolicyNets> nets;    // expected_hand overlay when present
  std::optional<nn::Network> coach;  // p_win overlay when present

  // "greedy", "random", a checkpoint directory, or a run directory (its
  // latest checkpoint). A coach.ckpt beside the policy files is picked up.
  static ServiceModels Load(const std::string& description);
};

// Transport-independent session logic. Thread-safe.
class PlayService {
 public:
  using Clock = std::chrono::steady_clock;

  PlayService(ServiceModels models, ServiceOptions options);

  Reply Health() const;
  Reply CreateSession(const nlohmann::json& request);
  Reply GetSession(const std::string& id) const;
  Reply GetObservation(const std::string& id) const;
  Reply SubmitMove(const std::string& id, const nlohmann::json& request);
  Reply DeleteSession(const std::string& id);

  // Drops sessions idle for longer than the configured timeout.
  int PurgeIdle(Clock::time_point now);
  int session_count() const;

  // Engine state of a session, for tests and the terminal client.
  std::optional<GameState> StateForTesting(const std::string& id) const;

 private:
  struct Session {
    explicit Session(GameState initial) : state(std::move(initial)) {}

    std::string id;
    Position human = Position::kLandlord;
    std::uint64_t seed = 0;
    std::optional<double> p_win;
    GameState state;
    Rng rng;
    Clock::time_point created, updated;
    mutable std::shared_mutex mu;
  };

  std::shared_ptr<Session> Find(const std::string& id) const;
  nlohmann::json Descriptor(const Session& s) const;
  nlohmann::json Observation(const Session& s) const;
  // Bots move until the human is to act or the game ends.
  nlohmann::json PlayBots(Session& s);
  std::string NewId();

  ServiceModels models_;
  ServiceOptions options_;
  mutable std::shared_mutex sessions_mu_;
  std::map<std::string, std::shared_ptr<Session>> sessions_;
  std::mutex id_mu_;
  Rng id_rng_;
  std::uint64_t next_seed_ = 0;
};

// Observation of `state` as seen from `viewer`. Never contains hidden hands.
nlohmann::json ObservationJson(const GameState& state, Position viewer,
                               const PolicyNets* nets);

// Installs the /api/v1 routes on `server`.
void InstallRoutes(httplib::Server& server, PlayService& service);

}  // namespace ddz

#endif  // DDZ_PLAY_SERVICE_H_
