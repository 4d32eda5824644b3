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


#include "ddz/nn/optimizer.h"

#include <cmath>
#include <string>

#include "ddz/nn/serialize.h"

namespace ddz::nn {

std::string_view OptimizerName(OptimizerKind kind) {
  return kind == OptimizerKind::kRmsProp ? "rmsprop" : "sgd";
}

OptimizerKind ParseOptimizer(std::string_view name) {
  if (name == "rmsprop") return OptimizerKind::kRmsProp;
  if (name == "sgd") return OptimizerKind::kSgd;
  throw std::invalid_argument("unknown optimizer: " + std::string(name));
}

Optimizer::Optimizer(OptimizerConfig config, const Parameters& params)
    : config_(config), square_avg_(ZeroGradients(params)) {}

StepReport Optimizer::Step(Parameters& params, const Gradients& grads) {
  if (grads.size() != params.tensors.size()) {
    throw ShapeError("gradient count does not match parameters");
  }
  StepReport report;
  double sq = 0.0;
  for (std::size_t k = 0; k < grads.size(); ++k) {
    const Matrix& p = params.tensors[k].second;
    if (grads[k].rows() != p.rows() || grads[k].cols() != p.cols()) {
      throw ShapeError("gradient shape mismatch for " + params.tensors[k].first);
    }
    sq += grads[k].squaredNorm();
  }
  report.grad_norm = std::sqrt(sq);
  if (!std::isfinite(report.grad_norm)) {
    ++skipped_;
    return report;
  }
  double scale = 1.0;
  if (config_.max_grad_norm > 0 && report.grad_norm > config_.max_grad_norm) {
    scale = config_.max_grad_norm / report.grad_norm;
  }
  const double lr = config_.learning_rate;
  for (std::size_t k = 0; k < grads.size(); ++k) {
    Matrix& p = params.tensors[k].second;
    if (config_.kind == OptimizerKind::kSgd) {
      p.noalias() -= (lr * scale) * grads[k];
    } else {
      Matrix& v = square_avg_[k];
      const auto g = grads[k].array() * scale;
      v.array() = config_.alpha * v.array() + (1.0 - config_.alpha) * g.square();
      p.array() -= lr * g / (v.array().sqrt() + config_.epsilon);
    }
  }
  ++params.counter;
  report.applied = true;
  return report;
}

void Optimizer::Write(std::ostream& os) const {
  WriteString(os, std::string(OptimizerName(config_.kind)));
  WriteF64(os, config_.learning_rate);
  WriteF64(os, config_.alpha);
  WriteF64(os, config_.epsilon);
  WriteF64(os, config_.max_grad_norm);
  WriteU64(os, skipped_);
  WriteU32(os, static_cast<std::uint32_t>(square_avg_.size()));
  for (const Matrix& m : square_avg_) WriteMatrix(os, m);
}

void Optimizer::Read(std::istream& is) {
  config_.kind = ParseOptimizer(ReadString(is));
  config_.learning_rate = ReadF64(is);
  config_.alpha = ReadF64(is);
  config_.epsilon = ReadF64(is);
  config_.max_grad_norm = ReadF64(is);
  skipped_ = ReadU64(is);
  square_avg_.resize(ReadU32(is));
  for (Matrix& m : square_avg_) m = ReadMatrix(is);
}

}  // namespace ddz::nn
