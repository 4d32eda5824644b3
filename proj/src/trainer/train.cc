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

#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <exception>
#include <fstream>
#include <iostream>
#include <limits>
#include <sstream>
#include <thread>

#include "ddz/eval.h"
#include "ddz/nn/serialize.h"
#include "ddz/rng.h"
#include "ddz/trainer.h"

namespace ddz {
namespace {

namespace fs = std::filesystem;

constexpr std::string_view kStateMagic = "DDZTRN01";
constexpr char kMetricsHeader[] =
    "step\tframes\tepisodes\tloss_landlord\tloss_landlord_down\t"
    "loss_landlord_up\tpred_landlord\tpred_landlord_down\tpred_landlord_up\t"
    "beta\tacceptance_rate\tcoach_loss\teval_landlord_wp\n";
constexpr char kAuditHeader[] = "episode\tbeta\tp_win\tdraws\tdeal\n";

std::string Fmt(double v) {
  if (std::isnan(v)) return "nan";
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.9g", v);
  return buf;
}

// Counters persisted with every checkpoint.
struct Progress {
  std::uint64_t frames = 0;
  std::uint64_t steps = 0;
  std::uint64_t episodes = 0;
  std::uint64_t draws = 0;
  std::uint64_t accepted = 0;
  std::uint64_t band_violations = 0;
  std::uint64_t window_draws = 0;
  std::uint64_t window_accepted = 0;
  std::uint64_t last_checkpoint = 0;
  std::uint64_t last_eval = 0;
  std::uint64_t metrics_bytes = 0;
  std::uint64_t audit_bytes = 0;
  double coach_loss = std::numeric_limits<double>::quiet_NaN();
  // Most recent losses of each position's networks.
  std::array<double, kNumPositions> decision_loss = Unset();
  std::array<double, kNumPositions> prediction_loss = Unset();

  static std::array<double, kNumPositions> Unset() {
    std::array<double, kNumPositions> a;
    a.fill(std::numeric_limits<double>::quiet_NaN());
    return a;
  }
};

void WriteProgress(std::ostream& os, const Progress& p) {
  for (std::uint64_t v :
       {p.frames, p.steps, p.episodes, p.draws, p.accepted, p.band_violations,
        p.window_draws, p.window_accepted, p.last_checkpoint, p.last_eval,
        p.metrics_bytes, p.audit_bytes}) {
    nn::WriteU64(os, v);
  }
  nn::WriteF64(os, p.coach_loss);
  for (double v : p.decision_loss) nn::WriteF64(os, v);
  for (double v : p.prediction_loss) nn::WriteF64(os, v);
}

Progress ReadProgress(std::istream& is) {
  Progress p;
  for (std::uint64_t* v :
       {&p.frames, &p.steps, &p.episodes, &p.draws, &p.accepted,
        &p.band_violations, &p.window_draws, &p.window_accepted,
        &p.last_checkpoint, &p.last_eval, &p.metrics_bytes, &p.audit_bytes}) {
    *v = nn::ReadU64(is);
  }
  p.coach_loss = nn::ReadF64(is);
  for (double& v : p.decision_loss) v = nn::ReadF64(is);
  for (double& v : p.prediction_loss) v = nn::ReadF64(is);
  return p;
}

template <typename T, typename WriteItem>
void WriteQueue(std::ostream& os, const BoundedQueue<T>& q, WriteItem write) {
  const std::vector<T> items = q.Snapshot();
  nn::WriteU64(os, q.produced());
  nn::WriteU64(os, q.consumed());
  nn::WriteU64(os, items.size());
  for (const T& item : items) write(os, item);
}

template <typename T, typename ReadItem>
void ReadQueue(std::istream& is, BoundedQueue<T>& q, ReadItem read) {
  const std::uint64_t produced = nn::ReadU64(is);
  const std::uint64_t consumed = nn::ReadU64(is);
  const std::uint64_t n = nn::ReadU64(is);
  if (n > q.capacity()) throw nn::CheckpointError("queue exceeds capacity");
  std::vector<T> items;
  items.reserve(n);
  for (std::uint64_t i = 0; i < n; ++i) items.push_back(read(is));
  q.Restore(std::move(items), produced, consumed);
}

void WriteCoachExample(std::ostream& os, const CoachExample& e) {
  nn::WriteString(os, FormatDeal(e.deal));
  nn::WriteU32(os, static_cast<std::uint32_t>(e.outcome));
}

CoachExample ReadCoachExample(std::istream& is) {
  CoachExample e;
  e.deal = ParseDeal(nn::ReadString(is));
  e.outcome = static_cast<int>(nn::ReadU32(is));
  return e;
}

class Trainer {
 public:
  Trainer(TrainerConfig config, fs::path run_dir, std::ostream* log)
      : config_(std::move(config)),
        run_dir_(std::move(run_dir)),
        log_(log),
        coach_queue_(static_cast<std::size_t>(config_.buffer_capacity)) {
    for (auto& b : buffers_) {
      b = std::make_unique<ReplayBuffer>(config_.buffer_capacity);
    }
  }

  void Start() {
    fs::create_directories(run_dir_ / "checkpoints");
    if (config_.ramp_frames == 0)
      config_.ramp_frames = config_.Beta().ramp_frames;
    WriteConfig();
    learner_ = LearnerState::Create(config_);
    {
      std::ofstream m(run_dir_ / "metrics.tsv", std::ios::trunc);
      m << kMetricsHeader;
    }
    if (config_.coach_enabled) {
      std::ofstream a(run_dir_ / "deal_audit.tsv", std::ios::trunc);
      a << kAuditHeader;
    }
    OpenLogs();
    Checkpoint();
  }

  void Resume(const TrainerConfig& requested) {
    const TrainerConfig stored = TrainerConfig::Load(run_dir_ / "config.txt");
    config_ = stored;
    config_.total_frames = requested.total_frames;
    config_.target_landlord_wp = requested.target_landlord_wp;
    config_.Validate();
    WriteConfig();
    for (auto& b : buffers_) {
      b = std::make_unique<ReplayBuffer>(config_.buffer_capacity);
    }
    const fs::path dir = LatestCheckpoint(run_dir_);
    learner_ = LearnerState::Create(config_);
    learner_.nets = PolicyNets::Load(dir);
    if (learner_.nets.opponent_model != config_.opponent_model_enabled) {
      throw nn::CheckpointMismatchError(dir.string() +
                                        ": opponent model flag mismatch");
    }
    if (config_.coach_enabled) {
      learner_.coach = nn::LoadNetwork(dir / kCoachCheckpointName,
                                       CoachNetSpec(config_.coach_shape).Hash(),
                                       CoachLayoutHash());
    }
    std::ifstream in(dir / kTrainerStateName, std::ios::binary);
    if (!in)
      throw nn::CheckpointError("missing trainer state in " + dir.string());
    std::string magic(kStateMagic.size(), '\0');
    in.read(magic.data(), static_cast<std::streamsize>(magic.size()));
    if (magic != kStateMagic) throw nn::CheckpointError("bad trainer state");
    progress_ = ReadProgress(in);
    for (Position p : kAllPositions) {
      learner_.decision_opt[Index(p)].Read(in);
      if (config_.opponent_model_enabled)
        learner_.prediction_opt[Index(p)].Read(in);
    }
    if (config_.coach_enabled) learner_.coach_opt.Read(in);
    for (auto& b : buffers_) ReadQueue(in, *b, ReadSample);
    ReadQueue(in, coach_queue_, ReadCoachExample);
    fs::resize_file(run_dir_ / "metrics.tsv", progress_.metrics_bytes);
    if (config_.coach_enabled) {
      fs::resize_file(run_dir_ / "deal_audit.tsv", progress_.audit_bytes);
    }
    OpenLogs();
  }

  TrainResult Run() {
    if (config_.num_actors == 0) {
      RunInline();
    } else {
      RunThreaded();
    }
    if (progress_.last_checkpoint != progress_.frames) Checkpoint();
    result_.frames = progress_.frames;
    result_.steps = progress_.steps;
    result_.episodes = progress_.episodes;
    result_.last_checkpoint = LatestCheckpoint(run_dir_);
    result_.deals_drawn = progress_.draws;
    result_.deals_accepted = progress_.accepted;
    result_.band_violations = progress_.band_violations;
    return result_;
  }

 private:
  bool Done() const {
    return stop_ || progress_.frames >= config_.total_frames;
  }

  const nn::Network* CoachPtr() const {
    return config_.coach_enabled ? &learner_.coach : nullptr;
  }

  std::uint64_t EpisodeSeed(std::uint64_t episode) const {
    return DeriveSeed(DeriveSeed(config_.seed, 1), episode);
  }

  void RunInline() {
    actor_ = learner_.nets;
    const auto batch = static_cast<std::size_t>(config_.LearnerBatch());
    while (!Done()) {
      bool stepped = false;
      for (Position p : kAllPositions) {
        if (Done() || buffers_[Index(p)]->size() < batch) continue;
        const std::vector<Sample> samples =
            *buffers_[Index(p)]->TryPopBatch(batch);
        AfterStep(p, LearnerStep(learner_, p, samples));
        if (progress_.steps % config_.sync_interval == 0) {
          SyncWeights(learner_.nets, actor_);
        }
        stepped = true;
      }
      if (stepped) continue;
      const std::uint64_t episode = progress_.episodes++;
      RolloutResult r = Rollout(actor_, CoachPtr(), config_, CurrentBeta(),
                                EpisodeSeed(episode));
      RecordEpisode(episode, r);
      for (Sample& s : r.samples) {
        if (!buffers_[Index(s.position)]->TryPush(std::move(s))) {
          throw std::runtime_error(
              "replay buffer overflow; raise buffer_capacity");
        }
      }
      if (config_.coach_enabled) {
        coach_queue_.TryPush({r.deal, r.winner == Position::kLandlord ? 1 : 0});
        while (auto examples =
                   coach_queue_.TryPopBatch(config_.coach_batch_size)) {
          progress_.coach_loss =
              CoachTrainStep(learner_.coach, learner_.coach_opt, *examples)
                  .loss;
        }
      }
    }
  }

  void RunThreaded() {
    ParameterStore store;
    SnapshotStore<nn::Network> coach_store;
    store.Publish(learner_.nets, progress_.steps);
    if (config_.coach_enabled) coach_store.Publish(learner_.coach, 0);
    frames_.store(progress_.frames);

    std::exception_ptr failure;
    std::mutex failure_mu;
    auto fail = [&](std::exception_ptr e) {
      {
        std::lock_guard lock(failure_mu);
        if (!failure) failure = e;
      }
      Shutdown();
    };

    std::vector<std::thread> threads;
    for (int a = 0; a < config_.num_actors; ++a) {
      threads.emplace_back([&] {
        try {
          auto snap = store.Get();
          PolicyNets local = snap->value;
          std::uint64_t version = snap->version;
          std::shared_ptr<const SnapshotStore<nn::Network>::Snapshot> coach;
          while (!stop_) {
            snap = store.Get();
            if (snap->version != version) {
              SyncWeights(snap->value, local);
              version = snap->version;
            }
            if (config_.coach_enabled) coach = coach_store.Get();
            std::uint64_t episode;
            {
              std::lock_guard lock(stats_mu_);
              episode = progress_.episodes++;
            }
            const double beta = config_.Beta().At(frames_.load());
            RolloutResult r = Rollout(local, coach ? &coach->value : nullptr,
                                      config_, beta, EpisodeSeed(episode));
            {
              std::lock_guard lock(stats_mu_);
              RecordEpisode(episode, r);
            }
            for (Sample& s : r.samples) {
              if (!buffers_[Index(s.position)]->Push(std::move(s))) return;
            }
            if (config_.coach_enabled &&
                !coach_queue_.Push({r.deal, r.winner == Position::kLandlord})) {
              return;
            }
          }
        } catch (...) {
          fail(std::current_exception());
        }
      });
    }
    if (config_.coach_enabled) {
      threads.emplace_back([&] {
        try {
          while (auto examples =
                     coach_queue_.PopBatch(config_.coach_batch_size)) {
            std::lock_guard lock(coach_mu_);
            const double loss =
                CoachTrainStep(learner_.coach, learner_.coach_opt, *examples)
                    .loss;
            coach_store.Publish(learner_.coach, 0);
            std::lock_guard stats(stats_mu_);
            progress_.coach_loss = loss;
          }
        } catch (...) {
          fail(std::current_exception());
        }
      });
    }

    try {
      const auto batch = static_cast<std::size_t>(config_.LearnerBatch());
      while (!Done() && !buffers_[0]->closed()) {
        bool stepped = false;
        for (Position p : kAllPositions) {
          if (Done()) break;
          auto samples = buffers_[Index(p)]->TryPopBatch(batch);
          if (!samples) continue;
          AfterStep(p, LearnerStep(learner_, p, *samples));
          frames_.store(progress_.frames);
          if (progress_.steps % config_.sync_interval == 0) {
            store.Publish(learner_.nets, progress_.steps);
          }
          stepped = true;
        }
        if (!stepped) std::this_thread::sleep_for(std::chrono::milliseconds(1));
      }
    } catch (...) {
      fail(std::current_exception());
    }
    Shutdown();
    for (auto& t : threads) t.join();
    if (failure) std::rethrow_exception(failure);
  }

  void Shutdown() {
    stop_ = true;
    for (auto& b : buffers_) b->Close();
    coach_queue_.Close();
  }

  double CurrentBeta() const { return config_.Beta().At(progress_.frames); }

  // Caller holds stats_mu_ in threaded mode.
  void RecordEpisode(std::uint64_t episode, const RolloutResult& r) {
    progress_.draws += r.draws;
    progress_.window_draws += r.draws;
    ++progress_.accepted;
    ++progress_.window_accepted;
    if (!config_.coach_enabled) return;
    if (!AcceptDeal(r.p_win, r.beta)) ++progress_.band_violations;
    audit_ << episode << '\t' << Fmt(r.beta) << '\t' << Fmt(r.p_win) << '\t'
           << r.draws << '\t' << FormatDeal(r.deal) << '\n';
  }

  void AfterStep(Position position, const PositionLoss& loss) {
    std::unique_lock lock(stats_mu_);
    progress_.decision_loss[Index(position)] = loss.decision;
    progress_.prediction_loss[Index(position)] = loss.prediction;
    ++progress_.steps;
    progress_.frames += config_.FramesPerStep();
    std::optional<double> eval;
    if (config_.eval_interval > 0 &&
        progress_.frames - progress_.last_eval >= config_.eval_interval) {
      progress_.last_eval = progress_.frames;
      lock.unlock();
      eval = Evaluate();
      lock.lock();
      result_.last_eval_wp = eval;
      if (config_.target_landlord_wp > 0 &&
          *eval >= config_.target_landlord_wp && !result_.frames_to_target) {
        result_.frames_to_target = progress_.frames;
        stop_ = true;
      }
    }
    if (progress_.steps % config_.log_interval == 0 || eval) WriteRow(eval);
    lock.unlock();
    if (config_.checkpoint_interval > 0 &&
        progress_.frames - progress_.last_checkpoint >=
            config_.checkpoint_interval) {
      Checkpoint();
    }
  }

  double Evaluate() const {
    const NetworkAgent agent(learner_.nets, "trainee");
    const RandomAgent random;
    const TournamentReport report = RunTournament(
        agent, random,
        RandomDecks(config_.eval_games, DeriveSeed(config_.seed, 300)),
        Metric::kWP, DeriveSeed(config_.seed, 301));
    return report.a_landlord_wp;
  }

  void WriteRow(std::optional<double> eval) {
    std::ostringstream row;
    row << progress_.steps << '\t' << progress_.frames << '\t'
        << progress_.episodes;
    for (double v : progress_.decision_loss) row << '\t' << Fmt(v);
    for (double v : progress_.prediction_loss) row << '\t' << Fmt(v);
    const double beta = CurrentBeta();
    const double rate = progress_.window_draws == 0
                            ? std::numeric_limits<double>::quiet_NaN()
                            : static_cast<double>(progress_.window_accepted) /
                                  static_cast<double>(progress_.window_draws);
    row << '\t' << Fmt(beta) << '\t' << Fmt(rate) << '\t'
        << Fmt(progress_.coach_loss) << '\t' << (eval ? Fmt(*eval) : "-")
        << '\n';
    metrics_ << row.str();
    if (log_) *log_ << row.str() << std::flush;
    if (config_.coach_enabled && beta > 0 && progress_.window_draws > 0 &&
        rate < config_.acceptance_alarm) {
      std::cerr << "warning: coach acceptance rate " << Fmt(rate)
                << " below alarm threshold " << Fmt(config_.acceptance_alarm)
                << " at frame " << progress_.frames << '\n';
    }
    progress_.window_draws = 0;
    progress_.window_accepted = 0;
  }

  void WriteConfig() {
    nn::AtomicWrite(run_dir_ / "config.txt",
                    [&](std::ostream& os) { os << config_.ToText(); });
  }

  void OpenLogs() {
    metrics_.open(run_dir_ / "metrics.tsv", std::ios::app);
    if (!metrics_) throw IoError("cannot open metrics.tsv");
    if (config_.coach_enabled) {
      audit_.open(run_dir_ / "deal_audit.tsv", std::ios::app);
      if (!audit_) throw IoError("cannot open deal_audit.tsv");
    }
  }

  // Writes checkpoints/frames_N through a temporary directory, then moves
  // the latest pointer. A failure leaves the previous checkpoint in place.
  void Checkpoint() {
    std::lock_guard coach_lock(coach_mu_);
    std::lock_guard lock(stats_mu_);
    metrics_.flush();
    if (audit_.is_open()) audit_.flush();
    if (!metrics_ || (audit_.is_open() && !audit_)) {
      throw IoError("metrics write failed");
    }
    progress_.metrics_bytes = fs::file_size(run_dir_ / "metrics.tsv");
    progress_.audit_bytes =
        config_.coach_enabled ? fs::file_size(run_dir_ / "deal_audit.tsv") : 0;
    progress_.last_checkpoint = progress_.frames;
    // Actors restart from the checkpointed weights, so a resumed run sees
    // the same actor parameters as an uninterrupted one.
    if (config_.num_actors == 0 && progress_.steps > 0) {
      SyncWeights(learner_.nets, actor_);
    }

    const std::string name = "frames_" + std::to_string(progress_.frames);
    const fs::path root = run_dir_ / "checkpoints";
    const fs::path tmp = root / (name + ".tmp");
    fs::remove_all(tmp);
    fs::create_directories(tmp);
    learner_.nets.Save(tmp);
    if (config_.coach_enabled) {
      nn::SaveNetwork(tmp / kCoachCheckpointName, learner_.coach);
    }
    nn::AtomicWrite(tmp / kTrainerStateName, [&](std::ostream& os) {
      os.write(kStateMagic.data(),
               static_cast<std::streamsize>(kStateMagic.size()));
      WriteProgress(os, progress_);
      for (Position p : kAllPositions) {
        learner_.decision_opt[Index(p)].Write(os);
        if (config_.opponent_model_enabled) {
          learner_.prediction_opt[Index(p)].Write(os);
        }
      }
      if (config_.coach_enabled) learner_.coach_opt.Write(os);
      for (const auto& b : buffers_) WriteQueue(os, *b, WriteSample);
      WriteQueue(os, coach_queue_, WriteCoachExample);
    });
    const fs::path final_dir = root / name;
    fs::remove_all(final_dir);
    fs::rename(tmp, final_dir);
    nn::AtomicWrite(root / "latest",
                    [&](std::ostream& os) { os << name << '\n'; });
  }

  TrainerConfig config_;
  fs::path run_dir_;
  std::ostream* log_;
  LearnerState learner_;
  PolicyNets actor_;
  std::array<std::unique_ptr<ReplayBuffer>, kNumPositions> buffers_;
  BoundedQueue<CoachExample> coach_queue_;
  Progress progress_;
  TrainResult result_;
  std::ofstream metrics_, audit_;
  std::atomic<bool> stop_{false};
  std::atomic<std::uint64_t> frames_{0};
  std::mutex stats_mu_, coach_mu_;
};

}  // namespace

fs::path LatestCheckpoint(const fs::path& run_dir) {
  std::ifstream in(run_dir / "checkpoints" / "latest");
  std::string name;
  if (!in || !std::getline(in, name) || name.empty()) {
    throw nn::CheckpointError("no checkpoint in " + run_dir.string());
  }
  return run_dir / "checkpoints" / name;
}

TrainResult Train(const TrainerConfig& config, const fs::path& run_dir,
                  bool resume, std::ostream* log) {
  config.Validate();
  Trainer trainer(config, run_dir, log);
  if (resume) {
    trainer.Resume(config);
  } else {
    trainer.Start();
  }
  return trainer.Run();
}

}  // namespace ddz
