// Copyright 2026 The mctses Authors
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

#include "mctses/deepsets.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <limits>
#include <sstream>

#include "mctses/error.hpp"
#include "mctses/rng.hpp"

namespace mctses {
namespace {

// Visits every parameter tensor in layout order.
template <typename P, typename Fn>
void ForEachTensor(P& params, Fn&& fn) {
  for (std::size_t i = 0; i < params.equivariant.size(); ++i) {
    const std::string prefix = "eq" + std::to_string(i) + ".";
    fn(prefix + "A", params.equivariant[i].A);
    fn(prefix + "C", params.equivariant[i].C);
    fn(prefix + "b", params.equivariant[i].b);
  }
  fn(std::string("inv.A"), params.invariant.A);
  fn(std::string("inv.C"), params.invariant.C);
  fn(std::string("inv.b"), params.invariant.b);
  fn(std::string("policy.w"), params.policy_w);
  fn(std::string("policy.b"), params.policy_b);
  fn(std::string("value.w"), params.value_w);
  fn(std::string("value.b"), params.value_b);
}

void ValidateDims(const NetDims& dims) {
  if (dims.input_dim < 1 || dims.hidden < 1 || dims.num_equivariant < 1) {
    throw ConfigError("deepsets: input_dim, hidden and num_equivariant must be >= 1");
  }
  if (dims.mode == ActionMode::kFixedActions && dims.num_fixed_actions < 1) {
    throw ConfigError("deepsets: fixed action mode needs num_fixed_actions >= 1");
  }
}

void CheckObservation(const NetParams& params, const Observation& obs) {
  if (obs.features.rows() < 1) throw ContractError("deepsets: empty observation");
  if (obs.features.cols() != params.dims.input_dim) {
    throw ContractError("deepsets: feature width " + std::to_string(obs.features.cols()) +
                        " != input_dim " + std::to_string(params.dims.input_dim));
  }
  if (obs.mode != params.dims.mode) throw ContractError("deepsets: action mode mismatch");
  const int expected = obs.mode == ActionMode::kSetIndexed
                           ? static_cast<int>(obs.features.rows())
                           : params.dims.num_fixed_actions;
  if (obs.num_actions() != expected) {
    throw ContractError("deepsets: legal mask has wrong length");
  }
  if (obs.num_legal() == 0) throw ContractError("deepsets: no legal actions");
}

Matrix Relu(const Matrix& m) { return m.cwiseMax(0.0); }

std::vector<double> ReadoutLogits(const NetParams& params, const Matrix& hidden,
                                  const RowVector& pooled,
                                  const std::vector<std::uint8_t>& legal) {
  std::vector<double> logits(legal.size());
  if (params.dims.mode == ActionMode::kSetIndexed) {
    const Vector item = hidden * params.policy_w.col(0);
    for (std::size_t i = 0; i < legal.size(); ++i) logits[i] = item(i) + params.policy_b(0);
  } else {
    const RowVector out = pooled * params.policy_w + params.policy_b;
    for (std::size_t i = 0; i < legal.size(); ++i) logits[i] = out(i);
  }
  for (std::size_t i = 0; i < legal.size(); ++i) {
    if (!legal[i]) logits[i] = kMaskedLogit;
  }
  return logits;
}

void PutU64(std::string& out, std::uint64_t v) {
  for (int i = 0; i < 8; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

std::uint64_t GetU64(const char* p) {
  std::uint64_t v = 0;
  for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(static_cast<unsigned char>(p[i])) << (8 * i);
  return v;
}

}  // namespace

NetDims DimsFor(const Observation& obs, int hidden, int num_equivariant) {
  NetDims dims;
  dims.input_dim = static_cast<int>(obs.features.cols());
  dims.hidden = hidden;
  dims.num_equivariant = num_equivariant;
  dims.mode = obs.mode;
  dims.num_fixed_actions = obs.mode == ActionMode::kFixedActions ? obs.num_fixed_actions : 0;
  return dims;
}

std::vector<TensorSlot> Layout(const NetDims& dims) {
  ValidateDims(dims);
  NetParams shape = ZeroParams(dims);
  std::vector<TensorSlot> layout;
  std::size_t offset = 0;
  ForEachTensor(shape, [&](const std::string& name, const auto& t) {
    layout.push_back({name, static_cast<int>(t.rows()), static_cast<int>(t.cols()), offset});
    offset += static_cast<std::size_t>(t.size());
  });
  return layout;
}

std::size_t ParamCount(const NetDims& dims) {
  const auto layout = Layout(dims);
  return layout.back().offset + layout.back().size();
}

NetParams ZeroParams(const NetDims& dims) {
  ValidateDims(dims);
  NetParams p;
  p.dims = dims;
  int in = dims.input_dim;
  for (int i = 0; i < dims.num_equivariant; ++i) {
    p.equivariant.push_back(LayerParams{Matrix::Zero(in, dims.hidden),
                                        Matrix::Zero(in, dims.hidden),
                                        RowVector::Zero(dims.hidden)});
    in = dims.hidden;
  }
  p.invariant = LayerParams{Matrix::Zero(dims.hidden, dims.hidden),
                            Matrix::Zero(dims.hidden, dims.hidden),
                            RowVector::Zero(dims.hidden)};
  p.policy_w = Matrix::Zero(dims.hidden, dims.policy_width());
  p.policy_b = RowVector::Zero(dims.policy_width());
  p.value_w = Matrix::Zero(dims.hidden, 1);
  p.value_b = RowVector::Zero(1);
  return p;
}

NetParams InitParams(std::uint64_t seed, const NetDims& dims) {
  NetParams p = ZeroParams(dims);
  Rng rng(seed);
  ForEachTensor(p, [&](const std::string& name, auto& t) {
    if (name.ends_with(".b")) return;  // biases stay zero
    const double limit = 1.0 / std::sqrt(static_cast<double>(t.rows()));
    for (Eigen::Index i = 0; i < t.size(); ++i) {
      t.data()[i] = (2.0 * rng.Uniform() - 1.0) * limit;
    }
  });
  return p;
}

FlatParams Flatten(const NetParams& params) {
  FlatParams flat;
  flat.dims = params.dims;
  flat.layout = Layout(params.dims);
  flat.values = FlattenValues(params);
  return flat;
}

std::vector<double> FlattenValues(const NetParams& params) {
  std::vector<double> values;
  ForEachTensor(params, [&](const std::string&, const auto& t) {
    values.insert(values.end(), t.data(), t.data() + t.size());
  });
  return values;
}

NetParams Unflatten(const std::vector<double>& values, const NetDims& dims) {
  NetParams p = ZeroParams(dims);
  std::size_t offset = 0;
  const std::size_t expected = ParamCount(dims);
  if (values.size() != expected) {
    throw ContractError("unflatten: got " + std::to_string(values.size()) +
                        " values, layout needs " + std::to_string(expected));
  }
  ForEachTensor(p, [&](const std::string&, auto& t) {
    std::copy_n(values.begin() + static_cast<std::ptrdiff_t>(offset), t.size(), t.data());
    offset += static_cast<std::size_t>(t.size());
  });
  return p;
}

NetParams Unflatten(const FlatParams& flat) {
  if (flat.layout != Layout(flat.dims)) {
    throw ContractError("unflatten: layout does not match dims");
  }
  return Unflatten(flat.values, flat.dims);
}

std::uint64_t Fingerprint(const NetParams& params) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  ForEachTensor(params, [&](const std::string&, const auto& t) {
    const auto* bytes = reinterpret_cast<const unsigned char*>(t.data());
    for (std::size_t i = 0; i < static_cast<std::size_t>(t.size()) * sizeof(double); ++i) {
      h = (h ^ bytes[i]) * 0x100000001b3ULL;
    }
  });
  return h;
}

Matrix EquivariantLayer(const Matrix& x, const LayerParams& layer, bool activate) {
  if (x.cols() != layer.A.rows() || layer.A.rows() != layer.C.rows() ||
      layer.A.cols() != layer.C.cols() || layer.b.size() != layer.A.cols()) {
    throw ContractError("equivariant_layer: shape mismatch");
  }
  const RowVector pooled = x.colwise().sum() * layer.C + layer.b;
  Matrix y = x * layer.A;
  y.rowwise() += pooled;
  return activate ? Relu(y) : y;
}

Prediction Forward(const NetParams& params, const Observation& obs, ForwardCache& cache) {
  CheckObservation(params, obs);
  cache = ForwardCache{};
  cache.fingerprint = Fingerprint(params);
  cache.num_items = static_cast<int>(obs.features.rows());
  cache.legal = obs.legal;
  Matrix h = obs.features;
  for (const auto& layer : params.equivariant) {
    cache.layer_inputs.push_back(h);
    Matrix pre = EquivariantLayer(h, layer, false);
    h = Relu(pre);
    cache.layer_pre.push_back(std::move(pre));
  }
  const Matrix inv = EquivariantLayer(h, params.invariant, false);
  cache.pooled_pre = inv.colwise().mean();
  cache.pooled = cache.pooled_pre.cwiseMax(0.0);
  cache.hidden = std::move(h);

  Prediction out;
  out.value = (cache.pooled * params.value_w)(0, 0) + params.value_b(0);
  out.logits = ReadoutLogits(params, cache.hidden, cache.pooled, obs.legal);
  return out;
}

Prediction Predict(const NetParams& params, const Observation& obs) {
  CheckObservation(params, obs);
  Matrix h = obs.features;
  for (const auto& layer : params.equivariant) h = EquivariantLayer(h, layer, true);
  const RowVector pooled =
      EquivariantLayer(h, params.invariant, false).colwise().mean().cwiseMax(0.0);
  Prediction out;
  out.value = (pooled * params.value_w)(0, 0) + params.value_b(0);
  out.logits = ReadoutLogits(params, h, pooled, obs.legal);
  return out;
}

std::vector<double> MaskedSoftmax(const std::vector<double>& logits,
                                  const std::vector<std::uint8_t>& legal) {
  if (logits.size() != legal.size()) throw ContractError("softmax: length mismatch");
  double hi = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < logits.size(); ++i) {
    if (legal[i]) hi = std::max(hi, logits[i]);
  }
  if (!std::isfinite(hi)) throw ContractError("softmax: no legal actions");
  std::vector<double> p(logits.size(), 0.0);
  double total = 0.0;
  for (std::size_t i = 0; i < logits.size(); ++i) {
    if (legal[i]) {
      p[i] = std::exp(logits[i] - hi);
      total += p[i];
    }
  }
  for (double& v : p) v /= total;
  return p;
}

std::string SerializeParams(const NetParams& params) {
  const NetDims& d = params.dims;
  std::ostringstream head;
  head << "mctses-params 1\n";
  head << "dims " << d.input_dim << ' ' << d.hidden << ' ' << d.num_equivariant << ' '
       << (d.mode == ActionMode::kSetIndexed ? "set" : "fixed") << ' '
       << d.num_fixed_actions << '\n';
  const auto layout = Layout(d);
  for (const auto& slot : layout) {
    head << "tensor " << slot.name << ' ' << slot.rows << ' ' << slot.cols << ' '
         << slot.offset << '\n';
  }
  const auto values = FlattenValues(params);
  head << "data " << values.size() << '\n';
  std::string out = head.str();
  out.reserve(out.size() + values.size() * 8);
  for (double v : values) PutU64(out, std::bit_cast<std::uint64_t>(v));
  return out;
}

NetParams DeserializeParams(const std::string& bytes) {
  std::size_t pos = 0;
  auto next_line = [&]() {
    const std::size_t end = bytes.find('\n', pos);
    if (end == std::string::npos) throw ParseError("checkpoint: truncated header", 0);
    std::string line = bytes.substr(pos, end - pos);
    pos = end + 1;
    return line;
  };
  if (next_line() != "mctses-params 1") throw ParseError("checkpoint: bad magic", 1);
  NetDims dims;
  {
    std::istringstream in(next_line());
    std::string tag, mode;
    in >> tag >> dims.input_dim >> dims.hidden >> dims.num_equivariant >> mode >>
        dims.num_fixed_actions;
    if (!in || tag != "dims" || (mode != "set" && mode != "fixed")) {
      throw ParseError("checkpoint: bad dims line", 2);
    }
    dims.mode = mode == "set" ? ActionMode::kSetIndexed : ActionMode::kFixedActions;
  }
  const auto layout = Layout(dims);
  int lineno = 2;
  for (const auto& slot : layout) {
    ++lineno;
    std::istringstream in(next_line());
    std::string tag;
    TensorSlot read;
    in >> tag >> read.name >> read.rows >> read.cols >> read.offset;
    if (!in || tag != "tensor" || !(read == slot)) {
      throw ParseError("checkpoint: layout mismatch at " + slot.name, lineno);
    }
  }
  std::size_t count = 0;
  {
    std::istringstream in(next_line());
    std::string tag;
    in >> tag >> count;
    if (!in || tag != "data" || count != ParamCount(dims)) {
      throw ParseError("checkpoint: bad data line", lineno + 1);
    }
  }
  if (bytes.size() - pos != count * 8) throw ParseError("checkpoint: data size mismatch", 0);
  std::vector<double> values(count);
  for (std::size_t i = 0; i < count; ++i) {
    values[i] = std::bit_cast<double>(GetU64(bytes.data() + pos + 8 * i));
  }
  return Unflatten(values, dims);
}

void SaveParams(const NetParams& params, const std::string& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw ConfigError("cannot write checkpoint: " + path);
  const std::string bytes = SerializeParams(params);
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw ConfigError("failed writing checkpoint: " + path);
}

NetParams LoadParams(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open checkpoint: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return DeserializeParams(buf.str());
}

}  // namespace mctses
