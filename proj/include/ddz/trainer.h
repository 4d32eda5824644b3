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

#ifndef DDZ_TRAINER_H_
#define DDZ_TRAINER_H_

#include <array>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <memory>
#include <mutex>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "ddz/coach.h"
#include "ddz/game.h"
#include "ddz/models.h"
#include "ddz/nn/optimizer.h"
#include "ddz/policy.h"
#include "ddz/replay_buffer.h"

namespace ddz {

class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

struct TrainerConfig {
  double epsilon = 0.01;
  int batch_size = 32;
  int unroll_length = 100;  // a learner batch is batch_size * unroll_length
  int sync_interval = 100;  // learner updates between actor refreshes
  std::uint64_t total_frames = 1000000;
  Metric objective = Metric::kADP;
  bool coach_enabled = true;
  bool opponent_model_enabled = true;
  std::uint64_t seed = 0;
  int num_actors = 0;  // 0: single-threaded deterministic mode
  int buffer_capacity = 50000;

  ModelShape shape;
  CoachShape coach_shape;
  double learning_rate = 1e-4;
  double prediction_learning_rate = 1e-4;
  double coach_learning_rate = 1e-3;
  double beta_max = 0.3;
  double ramp_fraction = 0.1;
  std::uint64_t ramp_frames = 0;  // overrides ramp_fraction when positive
  int coach_batch_size = 32;
  double acceptance_alarm = 0.05;
  std::uint64_t max_draws = 100000;  // consecutive coach rejections tolerated

  std::uint64_t checkpoint_interval = 0;  // frames; 0: first and last only
  int log_interval = 1;                   // learner steps per metrics row
  std::uint64_t eval_interval = 0;        // frames; 0: never
  int eval_games = 200;                   // decks vs random Peasants
  double target_landlord_wp = 0.0;        // stop once reached; 0: never

  int LearnerBatch() const { return batch_size * unroll_length; }
  // Frames count samples consumed by the learner over all positions.
  std::uint64_t FramesPerStep() const {
    return static_cast<std::uint64_t>(LearnerBatch());
  }
  BetaSchedule Beta() const;

  // Throws ConfigError naming the offending key.
  void Validate() const;
  void Set(std::string_view key, std::string_view value);
  // key=value lines; '#' starts a comment.
  static TrainerConfig Parse(std::string_view text);
  static TrainerConfig Load(const std::filesystem::path& path);
  std::string ToText() const;
};

// Networks, optimizers and the coach owned by the learner side.
struct LearnerState {
  PolicyNets nets;
  std::array<nn::Optimizer, kNumPositions> decision_opt;
  std::array<nn::Optimizer, kNumPositions> prediction_opt;
  nn::Network coach;
  nn::Optimizer coach_opt;

  static LearnerState Create(const TrainerConfig& config);
};

struct RolloutResult {
  std::vector<Sample> samples;
  Deal deal;
  double p_win = -1.0;  // coach estimate at draw time; -1 without a coach
  double beta = 0.0;
  std::uint64_t draws = 0;  // deals drawn, including the accepted one
  Position winner = Position::kLandlord;
  double landlord_payoff = 0.0;
};

// One self-play episode. `coach` may be null. Deals are drawn from one
// random stream and actions from another, so the coach affects only which
// deal is played.
RolloutResult Rollout(const PolicyNets& nets, const nn::Network* coach,
                      const TrainerConfig& config, double beta,
                      std::uint64_t seed);

struct PositionLoss {
  double decision = 0.0;
  double prediction = 0.0;  // per head; NaN when opponent modeling is off
  double prediction_uniform = 0.0;
  bool applied = false;
};

struct LossReport {
  std::array<double, kNumPositions> decision{};
  std::array<double, kNumPositions> prediction{};  // per head; NaN if off
  std::array<double, kNumPositions> prediction_uniform{};
  std::array<bool, kNumPositions> applied{};
};

// Mean squared error of each decision network on its batch.
double DecisionLoss(const nn::Network& net, std::span<const Sample> batch);

// One regression step for one position's network, plus one prediction step
// when opponent modeling is on.
PositionLoss LearnerStep(LearnerState& learner, Position position,
                         std::span<const Sample> batch);

// LearnerStep for every position; batches[i] belongs to position i.
LossReport LearnerStep(
    LearnerState& learner,
    const std::array<std::vector<Sample>, kNumPositions>& batches);

// Copies parameters after checking that specs and layouts agree. Throws
// nn::CheckpointMismatchError otherwise.
void SyncWeights(const PolicyNets& global, PolicyNets& local);

// Immutable versioned snapshots shared between the learner and actors.
template <typename T>
class SnapshotStore {
 public:
  struct Snapshot {
    std::uint64_t version = 0;
    T value;
  };

  void Publish(T value, std::uint64_t version) {
    auto next =
        std::make_shared<const Snapshot>(Snapshot{version, std::move(value)});
    std::lock_guard lock(mu_);
    current_ = std::move(next);
  }
  std::shared_ptr<const Snapshot> Get() const {
    std::lock_guard lock(mu_);
    return current_;
  }

 private:
  mutable std::mutex mu_;
  std::shared_ptr<const Snapshot> current_;
};

using ParameterStore = SnapshotStore<PolicyNets>;

struct TrainResult {
  std::uint64_t frames = 0;
  std::uint64_t steps = 0;
  std::uint64_t episodes = 0;
  std::filesystem::path last_checkpoint;
  std::optional<double> last_eval_wp;
  // Frames at the first evaluation reaching target_landlord_wp.
  std::optional<std::uint64_t> frames_to_target;
  std::uint64_t deals_drawn = 0;
  std::uint64_t deals_accepted = 0;
  std::uint64_t band_violations = 0;  // accepted deals outside the band
};

// Runs training into `run_dir`. With `resume`, continues from the latest
// checkpoint there; the stored configuration wins over `config` except for
// total_frames and target_landlord_wp. The beta ramp length is fixed when a
// run starts.
// Each metrics row is also copied to `log` when given.
TrainResult Train(const TrainerConfig& config,
                  const std::filesystem::path& run_dir, bool resume = false,
                  std::ostream* log = nullptr);

// "checkpoints/frames_N" directory named by the latest pointer.
std::filesystem::path LatestCheckpoint(const std::filesystem::path& run_dir);

inline constexpr std::string_view kCoachCheckpointName = "coach.ckpt";
inline constexpr std::string_view kTrainerStateName = "trainer_state.bin";

// Sample stream encoding used by trainer checkpoints.
void WriteSample(std::ostream& os, const Sample& s);
Sample ReadSample(std::istream& is);

}  // namespace ddz

#endif  // DDZ_TRAINER_H_
