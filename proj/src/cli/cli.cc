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

#include "ddz/cli.h"

#include <CLI11.hpp>
#include <chrono>
#include <condition_variable>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <mutex>
#include <thread>

#include "ddz/cards.h"
#include "ddz/eval.h"
#include "ddz/nn/serialize.h"
#include "ddz/play_service.h"
#include "ddz/trainer.h"

// After Eigen: <resolv.h> defines a _res macro.
#include <httplib.h>

namespace ddz {
namespace {

namespace fs = std::filesystem;

// ---------------------------------------------------------------------------
// train

struct TrainArgs {
  std::string config_file;
  std::string run_dir = "runs/default";
  std::vector<std::string> overrides;
  std::string coach, opponent_model;
  std::optional<std::uint64_t> seed, total_frames;
  std::optional<int> actors;
  bool resume = false;
};

int CmdTrain(const TrainArgs& a, std::ostream& out, std::ostream& err) {
  TrainerConfig config;
  std::vector<std::pair<std::string, std::string>> sets;
  for (const std::string& kv : a.overrides) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("override '" + kv + "' is not key=value");
    }
    sets.emplace_back(kv.substr(0, eq), kv.substr(eq + 1));
  }
  if (!a.coach.empty()) sets.emplace_back("coach", a.coach);
  if (!a.opponent_model.empty()) {
    sets.emplace_back("opponent_model", a.opponent_model);
  }
  if (a.seed) sets.emplace_back("seed", std::to_string(*a.seed));
  if (a.total_frames) {
    sets.emplace_back("total_frames", std::to_string(*a.total_frames));
  }
  if (a.actors) sets.emplace_back("num_actors", std::to_string(*a.actors));

  if (a.resume) {
    config = TrainerConfig::Load(fs::path(a.run_dir) / "config.txt");
    for (const auto& [key, value] : sets) {
      if (key != "total_frames" && key != "target_landlord_wp") {
        throw ConfigError("config key '" + key +
                          "' cannot change on resume; only total_frames and "
                          "target_landlord_wp can");
      }
    }
  } else {
    if (a.config_file.empty()) {
      throw ConfigError("a config file is required unless --resume is given");
    }
    config = TrainerConfig::Load(a.config_file);
  }
  for (const auto& [key, value] : sets) config.Set(key, value);
  config.Validate();

  const TrainResult r = Train(config, a.run_dir, a.resume, &err);
  out << "run_dir\t" << a.run_dir << "\n"
      << "frames\t" << r.frames << "\n"
      << "steps\t" << r.steps << "\n"
      << "episodes\t" << r.episodes << "\n"
      << "checkpoint\t" << r.last_checkpoint.string() << "\n";
  if (r.last_eval_wp) out << "eval_landlord_wp\t" << *r.last_eval_wp << "\n";
  if (r.frames_to_target) {
    out << "frames_to_target\t" << *r.frames_to_target << "\n";
  }
  return kExitOk;
}

// ---------------------------------------------------------------------------
// eval

struct EvalArgs {
  std::string a, b;
  std::string decks;
  int num_decks = 1000;
  std::uint64_t deck_seed = 0;
  std::string metric = "adp";
  std::uint64_t seed = 0;
  std::string out_tsv, out_json;
  int workers = 1;
};

std::unique_ptr<Agent> LoadAgent(const std::string& description) {
  if (description != "random" && description != "greedy") {
    fs::path dir = description;
    if (!fs::exists(dir)) {
      throw IoError("agent '" + description +
                    "' is not random, greedy, or an existing checkpoint");
    }
    if (fs::exists(dir / "checkpoints")) dir = LatestCheckpoint(dir);
    return std::make_unique<NetworkAgent>(PolicyNets::Load(dir), description);
  }
  return MakeAgent(description);
}

int CmdEval(const EvalArgs& a, std::ostream& out) {
  const Metric metric = ParseMetric(a.metric);
  const auto agent_a = LoadAgent(a.a);
  const auto agent_b = LoadAgent(a.b);
  const std::vector<Deal> decks = a.decks.empty()
                                      ? RandomDecks(a.num_decks, a.deck_seed)
                                      : ReadDeckFile(a.decks);
  const TournamentReport report =
      RunTournament(*agent_a, *agent_b, decks, metric, a.seed, a.workers);
  const std::string json = ReportJson(report);
  out << json << "\n";
  if (!a.out_json.empty()) {
    std::ofstream f(a.out_json);
    if (!(f << json << "\n")) throw IoError("cannot write " + a.out_json);
  }
  if (!a.out_tsv.empty()) {
    std::ofstream f(a.out_tsv);
    WriteReportTsv(f, report);
    if (!f) throw IoError("cannot write " + a.out_tsv);
  }
  return kExitOk;
}

// ---------------------------------------------------------------------------
// gen-decks

int CmdGenDecks(int n, std::uint64_t seed, const std::string& path,
                std::ostream& out) {
  WriteDeckFile(path, RandomDecks(n, seed));
  out << "wrote " << n << " decks to " << path << "\n";
  return kExitOk;
}

// ---------------------------------------------------------------------------
// inspect

void PrintHeader(const fs::path& file, std::ostream& out) {
  const nn::CheckpointHeader h = nn::ReadCheckpointHeader(file);
  out << file.string() << "\n"
      << "  version     " << h.version << "\n"
      << "  spec_hash   " << std::hex << std::setw(16) << std::setfill('0')
      << h.spec_hash << "\n"
      << "  layout_hash " << std::setw(16) << h.layout_hash << std::dec
      << std::setfill(' ') << "\n"
      << "  counter     " << h.counter << "\n"
      << "  spec        " << h.spec_text << "\n";
}

int CmdInspect(const std::string& path, std::ostream& out) {
  fs::path p = path;
  if (!fs::exists(p)) throw IoError("no such file or directory: " + path);
  if (fs::is_regular_file(p)) {
    PrintHeader(p, out);
    return kExitOk;
  }
  if (fs::exists(p / "config.txt")) {
    out << "run directory " << p.string() << "\n";
    std::ifstream config(p / "config.txt");
    out << config.rdbuf() << "\n";
  }
  if (fs::exists(p / "checkpoints")) {
    p = LatestCheckpoint(p);
    out << "latest checkpoint " << p.string() << "\n";
  }
  std::vector<fs::path> files;
  for (const auto& e : fs::directory_iterator(p)) {
    if (e.path().extension() == ".ckpt") files.push_back(e.path());
  }
  if (files.empty()) throw IoError("no checkpoint files in " + p.string());
  std::sort(files.begin(), files.end());
  for (const fs::path& f : files) PrintHeader(f, out);
  // Loading checks that the set is complete and consistent.
  const PolicyNets nets = PolicyNets::Load(p);
  out << "policy loads: opponent_model " << (nets.opponent_model ? "on" : "off")
      << "\n";
  return kExitOk;
}

// ---------------------------------------------------------------------------
// play

void PrintTable(const GameState& s, Position human, std::ostream& out) {
  out << "\nYour hand (" << PositionName(human)
      << "): " << s.Hand(human).ToString() << "\n"
      << "Cards left:";
  for (int i = 0; i < kNumPositions; ++i) {
    const auto p = static_cast<Position>(i);
    out << " " << PositionName(p) << " " << s.Hand(p).Total();
  }
  out << " | bombs " << s.bombs_played() << "\n";
  if (const auto& inc = s.trick_incumbent()) {
    out << "To beat: " << inc->move.ToString() << " ("
        << PositionName(inc->position) << ", "
        << CategoryName(inc->move.category) << ")\n";
  } else {
    out << "You lead.\n";
  }
}

int CmdPlay(const std::string& agent, const std::string& position,
            std::uint64_t seed, const std::string& deal_text, std::istream& in,
            std::ostream& out) {
  const Position human = ParsePosition(position);
  const auto bot = LoadAgent(agent);
  const Deal deal = deal_text.empty() ? DealCards(seed) : ParseDeal(deal_text);
  Rng rng(DeriveSeed(seed, 1));
  GameState s = GameState::NewGame(deal);
  out << "You play " << PositionName(human) << " against " << bot->Name()
      << ". Enter cards such as 33 or 3456789, 'pass', 'legal' or 'quit'.\n";
  while (!s.IsTerminal()) {
    const Position p = s.current_player();
    if (p != human) {
      const Move m = bot->Act(s, rng);
      if (s.CheckMove(m)) {
        throw std::logic_error("bot produced an illegal move " + m.ToString());
      }
      out << PositionName(p) << " plays " << m.ToString() << "\n";
      s = s.Step(m);
      continue;
    }
    PrintTable(s, human, out);
    for (;;) {
      out << "your move> " << std::flush;
      std::string line;
      if (!std::getline(in, line)) {
        throw IoError("input ended before the game finished");
      }
      line.erase(0, line.find_first_not_of(" \t"));
      line.erase(line.find_last_not_of(" \t\r") + 1);
      if (line == "quit") return kExitOk;
      if (line == "legal" || line == "?") {
        for (const Move& m : s.LegalActions()) out << "  " << m.ToString();
        out << "\n";
        continue;
      }
      try {
        const Move m = ParseMove(line);
        if (auto failure = s.CheckMove(m)) throw IllegalMoveError(*failure);
        s = s.Step(m);
        break;
      } catch (const IllegalMoveError& e) {
        out << "illegal move (" << e.rule() << "), try again\n";
      }
    }
  }
  const Payoff payoff = s.ComputePayoff(Metric::kADP);
  out << "Game over: " << PositionName(s.Winner()) << " went out. "
      << (IsPeasant(s.Winner()) == IsPeasant(human) ? "You win" : "You lose")
      << " " << std::showpos << payoff[human] << std::noshowpos << " points.\n";
  return kExitOk;
}

// ---------------------------------------------------------------------------
// serve

int CmdServe(const std::string& agent, const std::string& host, int port,
             int idle_timeout, std::uint64_t seed, std::ostream& out) {
  ServiceOptions options;
  options.idle_timeout = std::chrono::seconds(idle_timeout);
  options.seed = seed;
  PlayService service(ServiceModels::Load(agent), options);
  httplib::Server server;
  // Without SO_REUSEPORT a second server on the same port fails to bind.
  server.set_socket_options([](socket_t sock) {
    int yes = 1;
    setsockopt(sock, SOL_SOCKET, SO_REUSEADDR, &yes, sizeof(yes));
  });
  InstallRoutes(server, service);
  const int bound = port == 0 ? server.bind_to_any_port(host)
                              : (server.bind_to_port(host, port) ? port : -1);
  if (bound < 0) {
    throw IoError("cannot bind " + host + ":" + std::to_string(port) +
                  " (port in use?)");
  }
  out << "listening on http://" << host << ":" << bound << "\n" << std::flush;

  std::mutex mu;
  std::condition_variable cv;
  bool stopping = false;
  std::thread purger([&] {
    std::unique_lock<std::mutex> lock(mu);
    while (!cv.wait_for(lock, std::chrono::seconds(30),
                        [&] { return stopping; })) {
      service.PurgeIdle(PlayService::Clock::now());
    }
  });
  const bool ok = server.listen_after_bind();
  {
    std::lock_guard<std::mutex> lock(mu);
    stopping = true;
  }
  cv.notify_all();
  purger.join();
  return ok ? kExitOk : kExitIoError;
}

}  // namespace

int RunCli(const std::vector<std::string>& args, std::istream& in,
           std::ostream& out, std::ostream& err) {
  CLI::App app{"DouDizhu self-play training and evaluation", "ddz"};
  app.require_subcommand(1);

  TrainArgs train;
  auto* train_cmd = app.add_subcommand("train", "Run or resume training");
  train_cmd->add_option("config", train.config_file,
                        "key=value config file (optional with --resume)");
  train_cmd->add_option("--run-dir", train.run_dir, "Run directory")
      ->capture_default_str();
  train_cmd->add_option("--set", train.overrides,
                        "Config override key=value (repeatable)");
  train_cmd->add_option("--coach", train.coach, "Deal filtering on|off");
  train_cmd->add_option("--opponent-model", train.opponent_model,
                        "Opponent model on|off");
  train_cmd->add_option("--seed", train.seed, "Training seed");
  train_cmd->add_option("--total-frames", train.total_frames,
                        "Stop after this many frames");
  train_cmd->add_option("--actors", train.actors,
                        "Actor threads (0 = deterministic inline mode)");
  train_cmd->add_flag("--resume", train.resume,
                      "Continue from the latest checkpoint in --run-dir");

  EvalArgs eval;
  auto* eval_cmd = app.add_subcommand("eval", "Paired-deck tournament");
  eval_cmd
      ->add_option("-a,--agent-a", eval.a,
                   "random, greedy, checkpoint or run directory")
      ->required();
  eval_cmd
      ->add_option("-b,--agent-b", eval.b,
                   "random, greedy, checkpoint or run directory")
      ->required();
  eval_cmd->add_option("--decks", eval.decks, "Deck file (one deal per line)");
  eval_cmd
      ->add_option("--num-decks", eval.num_decks,
                   "Random decks when no deck file is given")
      ->capture_default_str()
      ->check(CLI::PositiveNumber);
  eval_cmd->add_option("--deck-seed", eval.deck_seed, "Seed for random decks")
      ->capture_default_str();
  eval_cmd->add_option("--metric", eval.metric, "wp or adp")
      ->capture_default_str()
      ->check(CLI::IsMember({"wp", "adp", "WP", "ADP"}));
  eval_cmd->add_option("--seed", eval.seed, "Seed for stochastic agents")
      ->capture_default_str();
  eval_cmd->add_option("--out", eval.out_tsv, "Per-deck results (TSV)");
  eval_cmd->add_option("--json", eval.out_json, "Report (JSON)");
  eval_cmd->add_option("--workers", eval.workers, "Threads")
      ->capture_default_str()
      ->check(CLI::PositiveNumber);

  int n = 0;
  std::uint64_t gen_seed = 0;
  std::string gen_out;
  auto* gen_cmd = app.add_subcommand("gen-decks", "Write random deals");
  gen_cmd->add_option("-n,--count", n, "Number of deals")
      ->required()
      ->check(CLI::PositiveNumber);
  gen_cmd->add_option("--seed", gen_seed, "Seed")->capture_default_str();
  gen_cmd->add_option("-o,--out", gen_out, "Output file")->required();

  std::string inspect_path;
  auto* inspect_cmd =
      app.add_subcommand("inspect", "Show checkpoint headers and run config");
  inspect_cmd
      ->add_option("path", inspect_path,
                   "Checkpoint file, checkpoint or run directory")
      ->required();

  std::string play_agent = "greedy", play_position = "landlord", play_deal;
  std::uint64_t play_seed = 0;
  auto* play_cmd = app.add_subcommand("play", "Play in the terminal");
  play_cmd
      ->add_option("--agent", play_agent,
                   "Bots: random, greedy, checkpoint or run directory")
      ->capture_default_str();
  play_cmd
      ->add_option("--position", play_position,
                   "landlord, landlord_down or landlord_up")
      ->capture_default_str();
  play_cmd->add_option("--seed", play_seed, "Deal and bot seed")
      ->capture_default_str();
  play_cmd->add_option("--deal", play_deal, "Explicit deal landlord|down|up");

  std::string serve_agent = "greedy", serve_host = "127.0.0.1";
  int serve_port = 8080, idle_timeout = 1800;
  std::uint64_t serve_seed = 0;
  auto* serve_cmd = app.add_subcommand("serve", "Start the play service");
  serve_cmd
      ->add_option("--agent", serve_agent,
                   "Bots: random, greedy, checkpoint or run directory")
      ->capture_default_str();
  serve_cmd->add_option("--host", serve_host, "Bind address")
      ->capture_default_str();
  serve_cmd->add_option("--port", serve_port, "Port (0 picks a free one)")
      ->capture_default_str()
      ->check(CLI::Range(0, 65535));
  serve_cmd
      ->add_option("--idle-timeout", idle_timeout,
                   "Seconds before an idle session is dropped")
      ->capture_default_str()
      ->check(CLI::PositiveNumber);
  serve_cmd
      ->add_option("--seed", serve_seed,
                   "Seed for sessions created without one")
      ->capture_default_str();

  std::vector<std::string> rest(args.begin() + (args.empty() ? 0 : 1),
                                args.end());
  std::reverse(rest.begin(), rest.end());
  try {
    app.parse(rest);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp& e) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n"
        << "run with --help for usage\n";
    return kExitConfigError;
  }

  try {
    if (*train_cmd) return CmdTrain(train, out, err);
    if (*eval_cmd) return CmdEval(eval, out);
    if (*gen_cmd) return CmdGenDecks(n, gen_seed, gen_out, out);
    if (*inspect_cmd) return CmdInspect(inspect_path, out);
    if (*play_cmd) {
      return CmdPlay(play_agent, play_position, play_seed, play_deal, in, out);
    }
    if (*serve_cmd) {
      return CmdServe(serve_agent, serve_host, serve_port, idle_timeout,
                      serve_seed, out);
    }
  } catch (const nn::CheckpointMismatchError& e) {
    err << "checkpoint mismatch: " << e.what() << "\n";
    return kExitCheckpointMismatch;
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << "\n";
    return kExitConfigError;
  } catch (const IoError& e) {
    err << "I/O error: " << e.what() << "\n";
    return kExitIoError;
  } catch (const nn::CheckpointError& e) {
    err << "I/O error: " << e.what() << "\n";
    return kExitIoError;
  } catch (const fs::filesystem_error& e) {
    err << "I/O error: " << e.what() << "\n";
    return kExitIoError;
  } catch (const std::invalid_argument& e) {
    err << "invalid argument: " << e.what() << "\n";
    return kExitConfigError;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitFailure;
  }
  return kExitFailure;
}

}  // namespace ddz
