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


#include "ddz/models.h"

#include "ddz/nn/network.h"

namespace ddz {

using nn::Activation;
using nn::LayerKind;
using nn::LayerSpec;

nn::NetworkSpec DecisionNetSpec(const ModelShape& shape, bool with_prediction) {
  const int state = with_prediction ? AugmentedStateFeatures::kSize
                                    : StateFeatures::kSize;
  std::vector<LayerSpec> layers = {
      {LayerKind::kRecurrent, kCardMatrixSize, shape.lstm_hidden,
       kHistoryLength},
      {LayerKind::kSide, state + kCardMatrixSize},
  };
  int width = shape.lstm_hidden + state + kCardMatrixSize;
  for (int i = 0; i + 1 < shape.decision_layers; ++i) {
    layers.push_back({LayerKind::kDense, width, shape.width, 0,
                      Activation::kRelu});
    width = shape.width;
  }
  layers.push_back({LayerKind::kDense, width, 1, 0, Activation::kLinear});
  return nn::NetworkSpec(std::move(layers));
}

nn::NetworkSpec PredictionNetSpec(const ModelShape& shape) {
  std::vector<LayerSpec> layers = {
      {LayerKind::kRecurrent, kCardMatrixSize, shape.lstm_hidden,
       kHistoryLength},
      {LayerKind::kSide, StateFeatures::kSize},
  };
  int width = shape.lstm_hidden + StateFeatures::kSize;
  for (int i = 0; i < shape.prediction_layers; ++i) {
    layers.push_back({LayerKind::kDense, width, shape.width, 0,
                      Activation::kRelu});
    width = shape.width;
  }
  std::vector<int> heads;
  for (int r = 0; r < kNumRanks; ++r) heads.push_back(HeadClasses(r));
  layers.push_back({LayerKind::kMultiHead, width, 0, 0, Activation::kLinear,
                    heads});
  return nn::NetworkSpec(std::move(layers));
}

nn::NetworkSpec CoachNetSpec(const CoachShape& shape) {
  constexpr int kSlots = kLandlordHandSize + 2 * kPeasantHandSize;
  std::vector<LayerSpec> layers = {
      {LayerKind::kEmbedding, kNumRanks, shape.embed, kSlots}};
  int width = shape.embed * kSlots;
  for (int i = 0; i < shape.layers; ++i) {
    layers.push_back({LayerKind::kDense, width, shape.width, 0,
                      Activation::kRelu});
    width = shape.width;
  }
  layers.push_back({LayerKind::kDense, width, 1, 0, Activation::kSigmoid});
  return nn::NetworkSpec(std::move(layers));
}

std::uint64_t DecisionLayoutHash(bool with_prediction) {
  return (with_prediction ? AugmentedStateLayout() : PlainStateLayout())
      .Hash();
}

std::uint64_t PredictionLayoutHash() {
  return Fnv1a64("prediction-target:" + PlainStateLayout().Describe());
}

std::uint64_t CoachLayoutHash() {
  return Fnv1a64("coach-tokens v1: landlord 20, down 17, up 17, ascending");
}

CompactHistory RecentMoves(const GameState& state) {
  CompactHistory out{};
  const auto& h = state.history();
  const int n = std::min<int>(kHistoryLength, static_cast<int>(h.size()));
  for (int i = 0; i < n; ++i) {
    out[kHistoryLength - n + i] = h[h.size() - n + i].move.cards;
  }
  return out;
}

void EncodeCardSetInto(const CardSet& cards, double* out) {
  for (int r = 0; r < kNumRanks; ++r) {
    const int c = cards.Count(r);
    for (int row = 0; row < 4; ++row) {
      out[row * kNumRanks + r] = row < c ? 1.0 : 0.0;
    }
  }
}

std::vector<nn::Matrix> HistoryBatch(
    std::span<const CompactHistory* const> h) {
  const int batch = static_cast<int>(h.size());
  std::vector<nn::Matrix> steps(kHistoryLength,
                                nn::Matrix(kCardMatrixSize, batch));
  for (int t = 0; t < kHistoryLength; ++t) {
    for (int j = 0; j < batch; ++j) {
      EncodeCardSetInto((*h[j])[t], steps[t].col(j).data());
    }
  }
  return steps;
}

nn::Matrix ToColumn(std::span<const float> values) {
  nn::Matrix m(static_cast<Eigen::Index>(values.size()), 1);
  for (std::size_t i = 0; i < values.size(); ++i) m(i, 0) = values[i];
  return m;
}

std::vector<double> DecisionQValues(const nn::Network& net,
                                    std::span<const float> state,
                                    const CompactHistory& history,
                                    std::span<const Move> actions) {
  if (actions.empty()) return {};
  nn::Inputs shared;
  const CompactHistory* one[] = {&history};
  shared.sequence = HistoryBatch(one);
  shared.side = ToColumn(state);
  nn::Matrix tail(kCardMatrixSize, static_cast<Eigen::Index>(actions.size()));
  for (std::size_t j = 0; j < actions.size(); ++j) {
    EncodeCardSetInto(actions[j].cards, tail.col(j).data());
  }
  const nn::Matrix q = net.ForwardShared(shared, tail);
  return std::vector<double>(q.data(), q.data() + q.size());
}

std::size_t ArgMax(std::span<const double> values) {
  std::size_t best = 0;
  for (std::size_t i = 1; i < values.size(); ++i) {
    if (values[i] > values[best]) best = i;
  }
  return best;
}

}  // namespace ddz
