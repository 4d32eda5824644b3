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
#include <istream>
#include <limits>
#include <ostream>
#include <string>

#include "ddz/nn/loss.h"
#include "ddz/nn/serialize.h"
#include "ddz/opponent_model.h"
#include "ddz/rng.h"
#include "ddz/trainer.h"

namespace ddz {
namespace {

nn::OptimizerConfig RmsProp(double learning_rate) {
  nn::OptimizerConfig c;
  c.learning_rate = learning_rate;
  return c;
}

nn::Inputs DecisionInputs(std::span<const Sample> batch) {
  const int n = static_cast<int>(batch.size());
  const int state = static_cast<int>(batch.front().state.size());
  std::vector<const CompactHistory*> histories(n);
  nn::Inputs in;
  in.side.resize(state + kCardMatrixSize, n);
  for (int j = 0; j < n; ++j) {
    const Sample& s = batch[j];
    if (static_cast<int>(s.state.size()) != state) {
      throw nn::ShapeError("mixed state sizes in one batch");
    }
    histories[j] = &s.history;
    double* col = in.side.col(j).data();
    for (int i = 0; i < state; ++i) col[i] = s.state[i];
    EncodeCardSetInto(s.action, col + state);
  }
  in.sequence = HistoryBatch(histories);
  return in;
}

nn::Matrix Targets(std::span<const Sample> batch) {
  nn::Matrix t(1, static_cast<Eigen::Index>(batch.size()));
  for (std::size_t j = 0; j < batch.size(); ++j)
    t(0, j) = batch[j].target_return;
  return t;
}

void CheckCompatible(const nn::Network& a, const nn::Network& b) {
  if (a.spec().Hash() != b.spec().Hash() ||
      a.params().layout_hash != b.params().layout_hash) {
    throw nn::CheckpointMismatchError("weight sync: spec or layout mismatch");
  }
}

}  // namespace

LearnerState LearnerState::Create(const TrainerConfig& config) {
  LearnerState s;
  s.nets = PolicyNets::Create(config.shape, config.opponent_model_enabled,
                              DeriveSeed(config.seed, 100));
  for (Position p : kAllPositions) {
    const int i = Index(p);
    s.decision_opt[i] = nn::Optimizer(RmsProp(config.learning_rate),
                                      s.nets.decision[i].params());
    if (config.opponent_model_enabled) {
      s.prediction_opt[i] =
          nn::Optimizer(RmsProp(config.prediction_learning_rate),
                        s.nets.prediction[i].params());
    }
  }
  if (config.coach_enabled) {
    s.coach = nn::Network(CoachNetSpec(config.coach_shape),
                          DeriveSeed(config.seed, 200));
    s.coach.mutable_params().layout_hash = CoachLayoutHash();
    s.coach_opt =
        nn::Optimizer(RmsProp(config.coach_learning_rate), s.coach.params());
  }
  return s;
}

RolloutResult Rollout(const PolicyNets& nets, const nn::Network* coach,
                      const TrainerConfig& config, double beta,
                      std::uint64_t seed) {
  RolloutResult r;
  r.beta = beta;
  Rng deal_rng(DeriveSeed(seed, 0));
  Rng play_rng(DeriveSeed(seed, 1));
  while (true) {
    r.deal = DealCards(deal_rng());
    ++r.draws;
    if (coach == nullptr) break;
    r.p_win = CoachPredict(*coach, r.deal);
    if (AcceptDeal(r.p_win, beta)) break;
    if (r.draws >= config.max_draws) {
      throw std::runtime_error("coach rejected " + std::to_string(r.draws) +
                               " consecutive deals");
    }
  }

  GameState state = GameState::NewGame(r.deal);
  while (!state.IsTerminal()) {
    DecisionPoint d = Observe(nets, state);
    const double u = play_rng.UniformReal();
    std::size_t pick = 0;
    if (d.legal.size() > 1) {
      if (u < config.epsilon) {
        pick = play_rng.UniformInt(d.legal.size());
      } else {
        pick = ArgMax(DecisionQValues(nets.decision[Index(d.position)], d.state,
                                      d.history, d.legal));
      }
    }
    Sample s;
    s.position = d.position;
    s.state = std::move(d.state);
    s.history = d.history;
    s.action = d.legal[pick].cards;
    s.true_next_hand = ToCounts(state.Hand(NextPosition(d.position)));
    s.legal_label = d.label;
    r.samples.push_back(std::move(s));
    state = state.Step(d.legal[pick]);
  }
  const Payoff payoff = state.ComputePayoff(config.objective);
  for (Sample& s : r.samples) {
    s.target_return = static_cast<float>(payoff[s.position]);
  }
  r.winner = state.Winner();
  r.landlord_payoff = payoff[Position::kLandlord];
  return r;
}

double DecisionLoss(const nn::Network& net, std::span<const Sample> batch) {
  return nn::MseLoss(net.Forward(DecisionInputs(batch)), Targets(batch)).value;
}

PositionLoss LearnerStep(LearnerState& learner, Position position,
                         std::span<const Sample> batch) {
  if (batch.empty()) throw std::invalid_argument("empty learner batch");
  const int i = Index(position);
  PositionLoss out;
  out.prediction = out.prediction_uniform =
      std::numeric_limits<double>::quiet_NaN();
  nn::Network& net = learner.nets.decision[i];
  nn::Cache cache;
  const nn::Matrix q = net.Forward(DecisionInputs(batch), &cache);
  const nn::LossResult loss = nn::MseLoss(q, Targets(batch));
  out.decision = loss.value;
  out.applied = learner.decision_opt[i]
                    .Step(net.mutable_params(), net.Backward(cache, loss.grad))
                    .applied;
  if (learner.nets.opponent_model) {
    std::vector<PredictionExample> examples;
    examples.reserve(batch.size());
    for (const Sample& s : batch) {
      examples.push_back(
          {std::span<const float>(s.state).first(StateFeatures::kSize),
           &s.history, s.legal_label, s.true_next_hand});
    }
    const PredictionStepReport pr = PredictionTrainStep(
        learner.nets.prediction[i], learner.prediction_opt[i], examples);
    out.prediction = pr.loss.per_head;
    out.prediction_uniform = pr.loss.uniform_per_head;
  }
  return out;
}

LossReport LearnerStep(
    LearnerState& learner,
    const std::array<std::vector<Sample>, kNumPositions>& batches) {
  LossReport report;
  for (Position p : kAllPositions) {
    const int i = Index(p);
    const PositionLoss l = LearnerStep(learner, p, batches[i]);
    report.decision[i] = l.decision;
    report.prediction[i] = l.prediction;
    report.prediction_uniform[i] = l.prediction_uniform;
    report.applied[i] = l.applied;
  }
  return report;
}

void SyncWeights(const PolicyNets& global, PolicyNets& local) {
  if (global.opponent_model != local.opponent_model) {
    throw nn::CheckpointMismatchError("weight sync: opponent model mismatch");
  }
  for (Position p : kAllPositions) {
    const int i = Index(p);
    CheckCompatible(global.decision[i], local.decision[i]);
    if (global.opponent_model) {
      CheckCompatible(global.prediction[i], local.prediction[i]);
    }
  }
  for (Position p : kAllPositions) {
    const int i = Index(p);
    local.decision[i].mutable_params() = global.decision[i].params();
    if (global.opponent_model) {
      local.prediction[i].mutable_params() = global.prediction[i].params();
    }
  }
}

void WriteSample(std::ostream& os, const Sample& s) {
  nn::WriteU32(os, static_cast<std::uint32_t>(Index(s.position)));
  nn::WriteU32(os, static_cast<std::uint32_t>(s.state.size()));
  for (float v : s.state) nn::WriteF64(os, v);
  for (const CardSet& c : s.history)
    os.write(reinterpret_cast<const char*>(c.counts().data()), kNumRanks);
  os.write(reinterpret_cast<const char*>(s.action.counts().data()), kNumRanks);
  nn::WriteF64(os, s.target_return);
  for (int v : s.true_next_hand)
    nn::WriteU32(os, static_cast<std::uint32_t>(v));
  for (int v : s.legal_label) nn::WriteU32(os, static_cast<std::uint32_t>(v));
}

Sample ReadSample(std::istream& is) {
  auto read_cards = [&is]() {
    std::array<char, kNumRanks> raw{};
    if (!is.read(raw.data(), kNumRanks)) {
      throw nn::CheckpointError("truncated sample");
    }
    std::array<int, kNumRanks> counts{};
    for (int r = 0; r < kNumRanks; ++r) counts[r] = raw[r];
    return CardSet::FromCounts(counts);
  };
  Sample s;
  const std::uint32_t position = nn::ReadU32(is);
  if (position >= kNumPositions) throw nn::CheckpointError("bad sample");
  s.position = static_cast<Position>(position);
  const std::uint32_t n = nn::ReadU32(is);
  if (n > AugmentedStateFeatures::kSize)
    throw nn::CheckpointError("bad sample");
  s.state.resize(n);
  for (float& v : s.state) v = static_cast<float>(nn::ReadF64(is));
  for (CardSet& c : s.history) c = read_cards();
  s.action = read_cards();
  s.target_return = static_cast<float>(nn::ReadF64(is));
  for (int& v : s.true_next_hand) v = static_cast<int>(nn::ReadU32(is));
  for (int& v : s.legal_label) v = static_cast<int>(nn::ReadU32(is));
  return s;
}

}  // namespace ddz
