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


#include "ddz/nn/loss.h"

#include <cmath>
#include <limits>
#include <string>

namespace ddz::nn {
namespace {

void SameShape(const Matrix& a, const Matrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw ShapeError("loss operands differ in shape");
  }
}

}  // namespace

LossResult MseLoss(const Matrix& pred, const Matrix& target) {
  SameShape(pred, target);
  if (pred.size() == 0) throw ShapeError("empty loss operands");
  const double n = static_cast<double>(pred.size());
  const Matrix diff = pred - target;
  return {diff.squaredNorm() / n, diff * (2.0 / n)};
}

Matrix MaskedSoftmax(const Matrix& logits, const Mask& mask) {
  if (logits.rows() != mask.rows() || logits.cols() != mask.cols()) {
    throw ShapeError("mask shape differs from logits");
  }
  Matrix p = Matrix::Zero(logits.rows(), logits.cols());
  for (Eigen::Index j = 0; j < logits.cols(); ++j) {
    double top = -std::numeric_limits<double>::infinity();
    for (Eigen::Index i = 0; i < logits.rows(); ++i) {
      if (mask(i, j)) top = std::max(top, logits(i, j));
    }
    if (top == -std::numeric_limits<double>::infinity()) {
      throw std::invalid_argument("empty mask in column " + std::to_string(j));
    }
    double sum = 0.0;
    for (Eigen::Index i = 0; i < logits.rows(); ++i) {
      if (mask(i, j)) sum += p(i, j) = std::exp(logits(i, j) - top);
    }
    p.col(j) /= sum;
  }
  return p;
}

LossResult MaskedCrossEntropy(const Matrix& logits, std::span<const int> labels,
                              const Mask& mask) {
  if (static_cast<Eigen::Index>(labels.size()) != logits.cols() ||
      logits.cols() == 0) {
    throw ShapeError("one label per column required");
  }
  for (Eigen::Index j = 0; j < logits.cols(); ++j) {
    const int y = labels[j];
    if (y < 0 || y >= logits.rows() || !mask(y, j)) {
      throw std::invalid_argument("label outside mask in column " +
                                  std::to_string(j));
    }
  }
  LossResult r;
  r.grad = MaskedSoftmax(logits, mask);
  const double n = static_cast<double>(logits.cols());
  for (Eigen::Index j = 0; j < logits.cols(); ++j) {
    r.value -= std::log(r.grad(labels[j], j));
    r.grad(labels[j], j) -= 1.0;
  }
  r.value /= n;
  r.grad /= n;
  return r;
}

LossResult BceLoss(const Matrix& p, const Matrix& labels) {
  SameShape(p, labels);
  if (p.size() == 0) throw ShapeError("empty loss operands");
  const double n = static_cast<double>(p.size());
  LossResult r{0.0, Matrix::Zero(p.rows(), p.cols())};
  for (Eigen::Index j = 0; j < p.cols(); ++j) {
    for (Eigen::Index i = 0; i < p.rows(); ++i) {
      const double y = labels(i, j);
      const double q = std::clamp(p(i, j), kBceClamp, 1.0 - kBceClamp);
      r.value -= y * std::log(q) + (1.0 - y) * std::log(1.0 - q);
      if (q == p(i, j)) r.grad(i, j) = (q - y) / (q * (1.0 - q)) / n;
    }
  }
  r.value /= n;
  return r;
}

}  // namespace ddz::nn
