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

#ifndef DDZ_NN_NETWORK_H_
#define DDZ_NN_NETWORK_H_

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <Eigen/Dense>

namespace ddz::nn {

// Columns are samples, rows are features.
using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using TokenMatrix = Eigen::MatrixXi;

class ShapeError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class NonFiniteError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class Activation { kLinear, kRelu, kSigmoid, kTanh };

std::string_view ActivationName(Activation a);
Activation ParseActivation(std::string_view name);

enum class LayerKind { kEmbedding, kRecurrent, kSide, kDense, kMultiHead };

// One entry of the declarative layer list. Field use depends on `kind`:
//   embedding  vocab dim tokens   (tokens = number of input slots)
//   recurrent  input hidden steps
//   side       size               (plain feature input)
//   dense      in out activation
//   multi_head in head_sizes      (linear logits, grouped into heads)
struct LayerSpec {
  LayerKind kind;
  int a = 0;
  int b = 0;
  int c = 0;
  Activation activation = Activation::kLinear;
  std::vector<int> head_sizes;

  friend bool operator==(const LayerSpec&, const LayerSpec&) = default;
};

// Input layers (embedding, recurrent, side; each at most once, in that
// order) are concatenated into the trunk input. Dense layers follow, and an
// optional multi_head layer closes the list.
class NetworkSpec {
 public:
  NetworkSpec() = default;
  explicit NetworkSpec(std::vector<LayerSpec> layers);

  static NetworkSpec Parse(std::string_view text);

  const std::vector<LayerSpec>& layers() const { return layers_; }
  const LayerSpec* embedding() const { return Find(LayerKind::kEmbedding); }
  const LayerSpec* recurrent() const { return Find(LayerKind::kRecurrent); }
  const LayerSpec* multi_head() const { return Find(LayerKind::kMultiHead); }
  int side_size() const;
  int trunk_input_size() const;
  int output_size() const;

  // One layer per line; stable, used for hashing and checkpoints.
  std::string Describe() const;
  std::uint64_t Hash() const;

  friend bool operator==(const NetworkSpec&, const NetworkSpec&) = default;

 private:
  const LayerSpec* Find(LayerKind kind) const;
  std::vector<LayerSpec> layers_;
};

struct Parameters {
  std::vector<std::pair<std::string, Matrix>> tensors;
  std::uint64_t layout_hash = 0;
  std::uint64_t counter = 0;

  Matrix& Get(std::string_view name);
  const Matrix& Get(std::string_view name) const;
  std::size_t Count() const;

  friend bool operator==(const Parameters&, const Parameters&) = default;
};

// Same order and shapes as Parameters::tensors.
using Gradients = std::vector<Matrix>;

Gradients ZeroGradients(const Parameters& params);

struct Inputs {
  TokenMatrix tokens;           // tokens x batch
  std::vector<Matrix> sequence; // steps of (input x batch), oldest first
  Matrix side;                  // side x batch

  int Batch() const;
};

struct Cache {
  std::uint64_t spec_hash = 0;
  int batch = 0;
  Inputs inputs;
  // Recurrent state; h and c have steps + 1 entries (index 0 is zero).
  std::vector<Matrix> gate_i, gate_f, gate_g, gate_o, cell, hidden;
  // Trunk layer inputs and post-activation outputs.
  std::vector<Matrix> layer_in, layer_out;
};

class Network {
 public:
  Network() = default;
  // Fan-in scaled uniform initialization.
  Network(NetworkSpec spec, std::uint64_t seed);
  Network(NetworkSpec spec, Parameters params);

  const NetworkSpec& spec() const { return spec_; }
  const Parameters& params() const { return params_; }
  Parameters& mutable_params() { return params_; }

  Matrix Forward(const Inputs& inputs, Cache* cache = nullptr) const;
  Gradients Backward(const Cache& cache, const Matrix& d_output) const;

  // Inference for many rows that share every input except a trailing block
  // of side features. `shared` has batch 1 and holds the leading side
  // entries; `side_tail` has one column per row.
  Matrix ForwardShared(const Inputs& shared, const Matrix& side_tail) const;

 private:
  void CheckInputs(const Inputs& inputs) const;
  NetworkSpec spec_;
  Parameters params_;
};

// Names and shapes a spec requires, in storage order.
std::vector<std::pair<std::string, std::pair<int, int>>> ParameterShapes(
    const NetworkSpec& spec);

}  // namespace ddz::nn

#endif  // DDZ_NN_NETWORK_H_
