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


#ifndef DDZ_NN_LOSS_H_
#define DDZ_NN_LOSS_H_

#include <span>

#include "ddz/nn/network.h"

namespace ddz::nn {

using Mask = Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic>;

struct LossResult {
  double value = 0.0;
  Matrix grad;  // dLoss/dInput, same shape as the prediction
};

// Mean of squared differences over every entry.
LossResult MseLoss(const Matrix& pred, const Matrix& target);

// Softmax restricted to the allowed classes of each column; disallowed
// classes get probability exactly 0.
Matrix MaskedSoftmax(const Matrix& logits, const Mask& mask);

// Mean over columns of -log p(label) under MaskedSoftmax. Throws
// std::invalid_argument on an empty mask or a label outside its mask.
LossResult MaskedCrossEntropy(const Matrix& logits, std::span<const int> labels,
                              const Mask& mask);

inline constexpr double kBceClamp = 1e-7;

// Mean binary cross-entropy of probabilities against 0/1 labels.
// Probabilities are clamped to [1e-7, 1 - 1e-7]; clamped entries get zero
// gradient.
LossResult BceLoss(const Matrix& p, const Matrix& labels);

}  // namespace ddz::nn

#endif  // DDZ_NN_LOSS_H_
