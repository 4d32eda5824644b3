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

#include "ddz/nn/network.h"

#include <cmath>
#include <numeric>
#include <sstream>

#include "ddz/features.h"
#include "ddz/rng.h"

namespace ddz::nn {
namespace {

std::string Fmt(const char* what, int got, int want) {
  std::ostringstream os;
  os << what << ": got " << got << ", want " << want;
  return os.str();
}

Matrix Sigmoid(const Matrix& z) {
  return (1.0 + (-z.array()).exp()).inverse().matrix();
}

void Activate(Matrix& z, Activation a) {
  switch (a) {
    case Activation::kLinear:
      break;
    case Activation::kRelu:
      z = z.cwiseMax(0.0);
      break;
    case Activation::kSigmoid:
      z = Sigmoid(z);
      break;
    case Activation::kTanh:
      z = z.array().tanh().matrix();
      break;
  }
}

// d_out (in place) becomes dL/dz given the post-activation output.
void ActivationBackward(Matrix& d, const Matrix& out, Activation a) {
  switch (a) {
    case Activation::kLinear:
      break;
    case Activation::kRelu:
      d = (out.array() > 0.0).select(d, 0.0);
      break;
    case Activation::kSigmoid:
      d.array() *= out.array() * (1.0 - out.array());
      break;
    case Activation::kTanh:
      d.array() *= 1.0 - out.array().square();
      break;
  }
}

std::string DenseName(int index, const char* part) {
  return "dense" + std::to_string(index) + "." + part;
}

}  // namespace

std::string_view ActivationName(Activation a) {
  switch (a) {
    case Activation::kLinear: return "linear";
    case Activation::kRelu: return "relu";
    case Activation::kSigmoid: return "sigmoid";
    case Activation::kTanh: return "tanh";
  }
  return "?";
}

Activation ParseActivation(std::string_view name) {
  for (Activation a : {Activation::kLinear, Activation::kRelu,
                       Activation::kSigmoid, Activation::kTanh}) {
    if (ActivationName(a) == name) return a;
  }
  throw ShapeError("unknown activation: " + std::string(name));
}

NetworkSpec::NetworkSpec(std::vector<LayerSpec> layers)
    : layers_(std::move(layers)) {
  // Input layers first, each at most once, in kind order.
  std::size_t i = 0;
  int last_kind = -1;
  while (i < layers_.size() && layers_[i].kind <= LayerKind::kSide) {
    const int kind = static_cast<int>(layers_[i].kind);
    if (kind <= last_kind) throw ShapeError("input layers out of order");
    last_kind = kind;
    const LayerSpec& l = layers_[i];
    if (l.kind == LayerKind::kSide ? l.a <= 0
                                   : (l.a <= 0 || l.b <= 0 || l.c <= 0)) {
      throw ShapeError("input layer dimensions must be positive");
    }
    ++i;
  }
  if (i == 0) throw ShapeError("network has no input layer");
  int width = trunk_input_size();
  bool any_trunk = false;
  for (; i < layers_.size(); ++i) {
    const LayerSpec& l = layers_[i];
    if (l.kind <= LayerKind::kSide) throw ShapeError("input layer after trunk");
    if (l.a != width) throw ShapeError(Fmt("layer input width", l.a, width));
    if (l.kind == LayerKind::kDense) {
      if (l.b <= 0) throw ShapeError("dense output must be positive");
      width = l.b;
    } else {
      if (i + 1 != layers_.size()) throw ShapeError("multi_head must be last");
      if (l.head_sizes.empty()) throw ShapeError("multi_head without heads");
      for (int h : l.head_sizes) {
        if (h <= 0) throw ShapeError("head size must be positive");
      }
    }
    any_trunk = true;
  }
  if (!any_trunk) throw ShapeError("network has no dense or multi_head layer");
}

NetworkSpec NetworkSpec::Parse(std::string_view text) {
  std::istringstream is{std::string(text)};
  std::string line;
  std::vector<LayerSpec> layers;
  while (std::getline(is, line)) {
    std::istringstream ls(line);
    std::string kind;
    if (!(ls >> kind)) continue;
    LayerSpec l{LayerKind::kDense};
    bool ok = true;
    if (kind == "embedding") {
      l.kind = LayerKind::kEmbedding;
      ok = static_cast<bool>(ls >> l.a >> l.b >> l.c);
    } else if (kind == "recurrent") {
      l.kind = LayerKind::kRecurrent;
      ok = static_cast<bool>(ls >> l.a >> l.b >> l.c);
    } else if (kind == "side") {
      l.kind = LayerKind::kSide;
      ok = static_cast<bool>(ls >> l.a);
    } else if (kind == "dense") {
      std::string act;
      ok = static_cast<bool>(ls >> l.a >> l.b >> act);
      if (ok) l.activation = ParseActivation(act);
    } else if (kind == "multi_head") {
      l.kind = LayerKind::kMultiHead;
      std::string heads;
      ok = static_cast<bool>(ls >> l.a >> heads);
      std::istringstream hs(heads);
      for (std::string h; ok && std::getline(hs, h, ',');) {
        l.head_sizes.push_back(std::stoi(h));
      }
    } else {
      throw ShapeError("unknown layer kind: " + kind);
    }
    if (!ok) throw ShapeError("malformed layer line: " + line);
    layers.push_back(std::move(l));
  }
  return NetworkSpec(std::move(layers));
}

const LayerSpec* NetworkSpec::Find(LayerKind kind) const {
  for (const LayerSpec& l : layers_) {
    if (l.kind == kind) return &l;
  }
  return nullptr;
}

int NetworkSpec::side_size() const {
  const LayerSpec* s = Find(LayerKind::kSide);
  return s ? s->a : 0;
}

int NetworkSpec::trunk_input_size() const {
  int n = side_size();
  if (const LayerSpec* e = embedding()) n += e->b * e->c;
  if (const LayerSpec* r = recurrent()) n += r->b;
  return n;
}

int NetworkSpec::output_size() const {
  const LayerSpec& last = layers_.back();
  if (last.kind == LayerKind::kMultiHead) {
    return std::accumulate(last.head_sizes.begin(), last.head_sizes.end(), 0);
  }
  return last.b;
}

std::string NetworkSpec::Describe() const {
  std::ostringstream os;
  for (const LayerSpec& l : layers_) {
    switch (l.kind) {
      case LayerKind::kEmbedding:
        os << "embedding " << l.a << ' ' << l.b << ' ' << l.c;
        break;
      case LayerKind::kRecurrent:
        os << "recurrent " << l.a << ' ' << l.b << ' ' << l.c;
        break;
      case LayerKind::kSide:
        os << "side " << l.a;
        break;
      case LayerKind::kDense:
        os << "dense " << l.a << ' ' << l.b << ' '
           << ActivationName(l.activation);
        break;
      case LayerKind::kMultiHead:
        os << "multi_head " << l.a << ' ';
        for (std::size_t i = 0; i < l.head_sizes.size(); ++i) {
          os << (i ? "," : "") << l.head_sizes[i];
        }
        break;
    }
    os << '\n';
  }
  return os.str();
}

std::uint64_t NetworkSpec::Hash() const { return Fnv1a64(Describe()); }

std::vector<std::pair<std::string, std::pair<int, int>>> ParameterShapes(
    const NetworkSpec& spec) {
  std::vector<std::pair<std::string, std::pair<int, int>>> out;
  int dense = 0;
  for (const LayerSpec& l : spec.layers()) {
    switch (l.kind) {
      case LayerKind::kEmbedding:
        out.push_back({"embedding.table", {l.b, l.a}});
        break;
      case LayerKind::kRecurrent:
        out.push_back({"recurrent.wx", {4 * l.b, l.a}});
        out.push_back({"recurrent.wh", {4 * l.b, l.b}});
        out.push_back({"recurrent.b", {4 * l.b, 1}});
        break;
      case LayerKind::kSide:
        break;
      case LayerKind::kDense:
        out.push_back({DenseName(dense, "w"), {l.b, l.a}});
        out.push_back({DenseName(dense, "b"), {l.b, 1}});
        ++dense;
        break;
      case LayerKind::kMultiHead:
        out.push_back({"head.w", {spec.output_size(), l.a}});
        out.push_back({"head.b", {spec.output_size(), 1}});
        break;
    }
  }
  return out;
}

Matrix& Parameters::Get(std::string_view name) {
  for (auto& [n, m] : tensors) {
    if (n == name) return m;
  }
  throw ShapeError("no parameter named " + std::string(name));
}

const Matrix& Parameters::Get(std::string_view name) const {
  return const_cast<Parameters*>(this)->Get(name);
}

std::size_t Parameters::Count() const {
  std::size_t n = 0;
  for (const auto& [name, m] : tensors) n += m.size();
  return n;
}

Gradients ZeroGradients(const Parameters& params) {
  Gradients g;
  g.reserve(params.tensors.size());
  for (const auto& [name, m] : params.tensors) {
    g.push_back(Matrix::Zero(m.rows(), m.cols()));
  }
  return g;
}

int Inputs::Batch() const {
  if (side.size() > 0 || side.cols() > 0) return static_cast<int>(side.cols());
  if (!sequence.empty()) return static_cast<int>(sequence.front().cols());
  return static_cast<int>(tokens.cols());
}

Network::Network(NetworkSpec spec, std::uint64_t seed) : spec_(std::move(spec)) {
  Rng rng(seed);
  double bound = 1.0;
  for (const auto& [name, shape] : ParameterShapes(spec_)) {
    Matrix m(shape.first, shape.second);
    // A bias shares the bound of the weight matrix listed before it.
    if (name == "embedding.table") {
      bound = 1.0;
    } else if (name.rfind("recurrent.", 0) == 0) {
      bound = 1.0 / std::sqrt(static_cast<double>(spec_.recurrent()->b));
    } else if (name.back() == 'w') {
      bound = 1.0 / std::sqrt(static_cast<double>(shape.second));
    }
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      for (Eigen::Index i = 0; i < m.rows(); ++i) {
        m(i, j) = (2.0 * rng.UniformReal() - 1.0) * bound;
      }
    }
    params_.tensors.emplace_back(name, std::move(m));
  }
}

Network::Network(NetworkSpec spec, Parameters params)
    : spec_(std::move(spec)), params_(std::move(params)) {
  const auto shapes = ParameterShapes(spec_);
  if (shapes.size() != params_.tensors.size()) {
    throw ShapeError(Fmt("parameter tensor count",
                         static_cast<int>(params_.tensors.size()),
                         static_cast<int>(shapes.size())));
  }
  for (std::size_t i = 0; i < shapes.size(); ++i) {
    const auto& [name, m] = params_.tensors[i];
    if (name != shapes[i].first || m.rows() != shapes[i].second.first ||
        m.cols() != shapes[i].second.second) {
      throw ShapeError("parameter " + name + " does not match spec");
    }
  }
}

void Network::CheckInputs(const Inputs& in) const {
  const int batch = in.Batch();
  if (batch <= 0) throw ShapeError("empty batch");
  if (const LayerSpec* e = spec_.embedding()) {
    if (in.tokens.rows() != e->c || in.tokens.cols() != batch) {
      throw ShapeError(Fmt("token rows", static_cast<int>(in.tokens.rows()),
                           e->c));
    }
    if ((in.tokens.array() < 0).any() || (in.tokens.array() >= e->a).any()) {
      throw ShapeError("token outside vocabulary");
    }
  } else if (in.tokens.size() > 0) {
    throw ShapeError("tokens given to a network without embedding");
  }
  if (const LayerSpec* r = spec_.recurrent()) {
    if (static_cast<int>(in.sequence.size()) != r->c) {
      throw ShapeError(Fmt("sequence steps",
                           static_cast<int>(in.sequence.size()), r->c));
    }
    for (const Matrix& x : in.sequence) {
      if (x.rows() != r->a || x.cols() != batch) {
        throw ShapeError(Fmt("sequence rows", static_cast<int>(x.rows()), r->a));
      }
    }
  } else if (!in.sequence.empty()) {
    throw ShapeError("sequence given to a network without recurrent layer");
  }
  if (in.side.rows() != spec_.side_size() ||
      (spec_.side_size() > 0 && in.side.cols() != batch)) {
    throw ShapeError(Fmt("side rows", static_cast<int>(in.side.rows()),
                         spec_.side_size()));
  }
}

Matrix Network::Forward(const Inputs& in, Cache* cache) const {
  CheckInputs(in);
  const int batch = in.Batch();
  Cache local;
  Cache& c = cache ? *cache : local;
  c = Cache{};
  c.spec_hash = spec_.Hash();
  c.batch = batch;
  if (cache) c.inputs = in;

  Matrix x(spec_.trunk_input_size(), batch);
  int row = 0;
  if (const LayerSpec* e = spec_.embedding()) {
    const Matrix& table = params_.Get("embedding.table");
    for (int j = 0; j < batch; ++j) {
      for (int s = 0; s < e->c; ++s) {
        x.block(row + s * e->b, j, e->b, 1) = table.col(in.tokens(s, j));
      }
    }
    row += e->b * e->c;
  }
  if (const LayerSpec* r = spec_.recurrent()) {
    const int h = r->b;
    const Matrix& wx = params_.Get("recurrent.wx");
    const Matrix& wh = params_.Get("recurrent.wh");
    const Matrix& b = params_.Get("recurrent.b");
    Matrix hid = Matrix::Zero(h, batch);
    Matrix cell = Matrix::Zero(h, batch);
    if (cache) {
      c.hidden.push_back(hid);
      c.cell.push_back(cell);
    }
    for (const Matrix& xt : in.sequence) {
      Matrix z = wx * xt + wh * hid;
      z.colwise() += b.col(0);
      Matrix gi = Sigmoid(z.topRows(h));
      Matrix gf = Sigmoid(z.middleRows(h, h));
      Matrix gg = z.middleRows(2 * h, h).array().tanh().matrix();
      Matrix go = Sigmoid(z.bottomRows(h));
      cell = (gf.array() * cell.array() + gi.array() * gg.array()).matrix();
      hid = (go.array() * cell.array().tanh()).matrix();
      if (cache) {
        c.gate_i.push_back(std::move(gi));
        c.gate_f.push_back(std::move(gf));
        c.gate_g.push_back(std::move(gg));
        c.gate_o.push_back(std::move(go));
        c.cell.push_back(cell);
        c.hidden.push_back(hid);
      }
    }
    x.middleRows(row, h) = hid;
    row += h;
  }
  if (spec_.side_size() > 0) x.bottomRows(spec_.side_size()) = in.side;

  int dense = 0;
  for (const LayerSpec& l : spec_.layers()) {
    if (l.kind <= LayerKind::kSide) continue;
    const bool head = l.kind == LayerKind::kMultiHead;
    const Matrix& w = params_.Get(head ? "head.w" : DenseName(dense, "w"));
    const Matrix& b = params_.Get(head ? "head.b" : DenseName(dense, "b"));
    Matrix z = w * x;
    z.colwise() += b.col(0);
    Activate(z, l.activation);
    if (cache) {
      c.layer_in.push_back(std::move(x));
      c.layer_out.push_back(z);
    }
    x = std::move(z);
    if (!head) ++dense;
  }
  if (!x.allFinite()) throw NonFiniteError("non-finite network output");
  return x;
}

Gradients Network::Backward(const Cache& c, const Matrix& d_output) const {
  if (c.spec_hash != spec_.Hash() || c.layer_out.empty()) {
    throw ShapeError("cache does not come from this network");
  }
  if (d_output.rows() != spec_.output_size() || d_output.cols() != c.batch) {
    throw ShapeError(Fmt("upstream gradient rows",
                         static_cast<int>(d_output.rows()),
                         spec_.output_size()));
  }
  Gradients grads = ZeroGradients(params_);
  auto index_of = [&](std::string_view name) {
    for (std::size_t i = 0; i < params_.tensors.size(); ++i) {
      if (params_.tensors[i].first == name) return i;
    }
    throw ShapeError("no parameter named " + std::string(name));
  };

  // Trunk layers in reverse.
  std::vector<const LayerSpec*> trunk;
  for (const LayerSpec& l : spec_.layers()) {
    if (l.kind > LayerKind::kSide) trunk.push_back(&l);
  }
  Matrix d = d_output;
  int dense = static_cast<int>(trunk.size()) -
              (spec_.multi_head() != nullptr ? 1 : 0);
  for (int k = static_cast<int>(trunk.size()) - 1; k >= 0; --k) {
    const LayerSpec& l = *trunk[k];
    const bool head = l.kind == LayerKind::kMultiHead;
    if (!head) --dense;
    const std::string wn = head ? "head.w" : DenseName(dense, "w");
    const std::string bn = head ? "head.b" : DenseName(dense, "b");
    ActivationBackward(d, c.layer_out[k], l.activation);
    grads[index_of(wn)] = d * c.layer_in[k].transpose();
    grads[index_of(bn)] = d.rowwise().sum();
    d = params_.Get(wn).transpose() * d;
  }

  int row = 0;
  if (const LayerSpec* e = spec_.embedding()) {
    Matrix& g = grads[index_of("embedding.table")];
    for (int j = 0; j < c.batch; ++j) {
      for (int s = 0; s < e->c; ++s) {
        g.col(c.inputs.tokens(s, j)) += d.block(row + s * e->b, j, e->b, 1);
      }
    }
    row += e->b * e->c;
  }
  if (const LayerSpec* r = spec_.recurrent()) {
    const int h = r->b;
    const Matrix& wh = params_.Get("recurrent.wh");
    Matrix& gwx = grads[index_of("recurrent.wx")];
    Matrix& gwh = grads[index_of("recurrent.wh")];
    Matrix& gb = grads[index_of("recurrent.b")];
    Matrix dh = d.middleRows(row, h);
    Matrix dc = Matrix::Zero(h, c.batch);
    Matrix dz(4 * h, c.batch);
    for (int t = r->c; t >= 1; --t) {
      const auto i = c.gate_i[t - 1].array();
      const auto f = c.gate_f[t - 1].array();
      const auto g = c.gate_g[t - 1].array();
      const auto o = c.gate_o[t - 1].array();
      const Eigen::ArrayXXd tc = c.cell[t].array().tanh();
      dc.array() += dh.array() * o * (1.0 - tc.square());
      dz.topRows(h) = (dc.array() * g * i * (1.0 - i)).matrix();
      dz.middleRows(h, h) =
          (dc.array() * c.cell[t - 1].array() * f * (1.0 - f)).matrix();
      dz.middleRows(2 * h, h) = (dc.array() * i * (1.0 - g.square())).matrix();
      dz.bottomRows(h) = (dh.array() * tc * o * (1.0 - o)).matrix();
      gwx.noalias() += dz * c.inputs.sequence[t - 1].transpose();
      gwh.noalias() += dz * c.hidden[t - 1].transpose();
      gb += dz.rowwise().sum();
      dh = wh.transpose() * dz;
      dc = (dc.array() * f).matrix();
    }
  }
  return grads;
}

Matrix Network::ForwardShared(const Inputs& shared,
                              const Matrix& side_tail) const {
  const int tail = static_cast<int>(side_tail.rows());
  const int lead = spec_.side_size() - tail;
  if (lead < 0 || shared.side.rows() != lead || shared.Batch() != 1) {
    throw ShapeError("shared inputs do not match side split");
  }
  const int rows = static_cast<int>(side_tail.cols());
  // Evaluate the shared prefix once by running the input layers on batch 1.
  Inputs probe = shared;
  probe.side = Matrix::Zero(spec_.side_size(), 1);
  if (lead > 0) probe.side.topRows(lead) = shared.side;
  CheckInputs(probe);

  Matrix prefix(spec_.trunk_input_size() - tail, 1);
  {
    int row = 0;
    if (const LayerSpec* e = spec_.embedding()) {
      const Matrix& table = params_.Get("embedding.table");
      for (int s = 0; s < e->c; ++s) {
        prefix.block(row + s * e->b, 0, e->b, 1) =
            table.col(shared.tokens(s, 0));
      }
      row += e->b * e->c;
    }
    if (const LayerSpec* r = spec_.recurrent()) {
      const int h = r->b;
      const Matrix& wx = params_.Get("recurrent.wx");
      const Matrix& wh = params_.Get("recurrent.wh");
      const Matrix& b = params_.Get("recurrent.b");
      Vector hid = Vector::Zero(h), cell = Vector::Zero(h);
      for (const Matrix& xt : shared.sequence) {
        const Vector z = wx * xt.col(0) + wh * hid + b.col(0);
        const Eigen::ArrayXd gi = Sigmoid(z.head(h)).array();
        const Eigen::ArrayXd gf = Sigmoid(z.segment(h, h)).array();
        const Eigen::ArrayXd gg = z.segment(2 * h, h).array().tanh();
        const Eigen::ArrayXd go = Sigmoid(z.tail(h)).array();
        cell = (gf * cell.array() + gi * gg).matrix();
        hid = (go * cell.array().tanh()).matrix();
      }
      prefix.middleRows(row, h) = hid;
      row += h;
    }
    if (lead > 0) prefix.bottomRows(lead) = shared.side;
  }

  int dense = 0;
  Matrix x;
  bool first = true;
  for (const LayerSpec& l : spec_.layers()) {
    if (l.kind <= LayerKind::kSide) continue;
    const bool head = l.kind == LayerKind::kMultiHead;
    const Matrix& w = params_.Get(head ? "head.w" : DenseName(dense, "w"));
    const Matrix& b = params_.Get(head ? "head.b" : DenseName(dense, "b"));
    Matrix z;
    if (first) {
      const Vector common =
          w.leftCols(prefix.rows()) * prefix.col(0) + b.col(0);
      z = w.rightCols(tail) * side_tail;
      z.colwise() += common;
      first = false;
    } else {
      z = w * x;
      z.colwise() += b.col(0);
    }
    Activate(z, l.activation);
    x = std::move(z);
    if (!head) ++dense;
  }
  if (rows == 0) return Matrix(spec_.output_size(), 0);
  if (!x.allFinite()) throw NonFiniteError("non-finite network output");
  return x;
}

}  // namespace ddz::nn
