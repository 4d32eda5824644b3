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


#ifndef DDZ_NN_OPTIMIZER_H_
#define DDZ_NN_OPTIMIZER_H_

#include <cstdint>
#include <iosfwd>
#include <string_view>
#include <vector>

#include "ddz/nn/network.h"

namespace ddz::nn {

enum class OptimizerKind { kRmsProp, kSgd };

std::string_view OptimizerName(OptimizerKind kind);
OptimizerKind ParseOptimizer(std::string_view name);

struct OptimizerConfig {
  OptimizerKind kind = OptimizerKind::kRmsProp;
  double learning_rate = 1e-4;
  double alpha = 0.99;           // RMSProp squared-gradient decay
  double epsilon = 1e-5;         // RMSProp denominator offset
  double max_grad_norm = 40.0;   // global-norm clip; <= 0 disables
};

struct StepReport {
  bool applied = false;  // false when a gradient was non-finite
  double grad_norm = 0.0;
};

class Optimizer {
 public:
  Optimizer() = default;
  Optimizer(OptimizerConfig config, const Parameters& params);

  // Updates `params` in place and advances its counter. Non-finite
  // gradients leave the parameters untouched.
  StepReport Step(Parameters& params, const Gradients& grads);

  const OptimizerConfig& config() const { return config_; }
  std::uint64_t skipped_steps() const { return skipped_; }

  void Write(std::ostream& os) const;
  void Read(std::istream& is);

 private:
  OptimizerConfig config_;
  std::vector<Matrix> square_avg_;
  std::uint64_t skipped_ = 0;
};

}  // namespace ddz::nn

#endif  // DDZ_NN_OPTIMIZER_H_
