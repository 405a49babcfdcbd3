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

#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "mctses/observation.hpp"

namespace mctses {

/// Logit assigned to illegal actions; finite so arithmetic stays finite.
inline constexpr double kMaskedLogit = -1e9;

/// Weights of one permutation-equivariant layer
///   Y = act(X A + 1 b + 1 (1^T X) C)
/// with A, C of shape d_in x d_out.
struct LayerParams {
  Matrix A;
  Matrix C;
  RowVector b;

  friend bool operator==(const LayerParams& x, const LayerParams& y) {
    return x.A == y.A && x.C == y.C && x.b == y.b;
  }
};

struct NetDims {
  int input_dim = 0;
  int hidden = 16;
  int num_equivariant = 1;
  ActionMode mode = ActionMode::kSetIndexed;
  int num_fixed_actions = 0;  // policy width for kFixedActions

  int policy_width() const {
    return mode == ActionMode::kSetIndexed ? 1 : num_fixed_actions;
  }
  friend bool operator==(const NetDims&, const NetDims&) = default;
};

// Dims for the network that reads `obs` (input width and action mode).
NetDims DimsFor(const Observation& obs, int hidden = 16, int num_equivariant = 1);

/// DeepSets prediction network. Hidden equivariant layers feed both the
/// per-item policy readout (set-indexed actions) and an invariant block
/// (equivariant layer, mean pooling, ReLU) that feeds the value head and,
/// for fixed action sets, the policy head.
struct NetParams {
  NetDims dims;
  std::vector<LayerParams> equivariant;
  LayerParams invariant;
  Matrix policy_w;    // hidden x policy_width
  RowVector policy_b;  // policy_width
  Matrix value_w;     // hidden x 1
  RowVector value_b;   // 1

  friend bool operator==(const NetParams& x, const NetParams& y) {
    return x.dims == y.dims && x.equivariant == y.equivariant &&
           x.invariant == y.invariant && x.policy_w == y.policy_w &&
           x.policy_b == y.policy_b && x.value_w == y.value_w && x.value_b == y.value_b;
  }
};

struct TensorSlot {
  std::string name;
  int rows = 0;
  int cols = 0;
  std::size_t offset = 0;

  std::size_t size() const { return static_cast<std::size_t>(rows) * cols; }
  friend bool operator==(const TensorSlot&, const TensorSlot&) = default;
};

struct FlatParams {
  NetDims dims;
  std::vector<TensorSlot> layout;
  std::vector<double> values;
};

std::vector<TensorSlot> Layout(const NetDims& dims);
std::size_t ParamCount(const NetDims& dims);

// Fan-in scaled uniform weights, zero biases; deterministic in seed.
NetParams InitParams(std::uint64_t seed, const NetDims& dims);
NetParams ZeroParams(const NetDims& dims);

FlatParams Flatten(const NetParams& params);
NetParams Unflatten(const FlatParams& flat);
NetParams Unflatten(const std::vector<double>& values, const NetDims& dims);
std::vector<double> FlattenValues(const NetParams& params);

// FNV-1a over the raw parameter bytes.
std::uint64_t Fingerprint(const NetParams& params);

Matrix EquivariantLayer(const Matrix& x, const LayerParams& layer, bool activate);

struct Prediction {
  double value = 0.0;
  std::vector<double> logits;  // illegal entries hold kMaskedLogit
};

/// Intermediates retained by Forward for the reverse pass.
struct ForwardCache {
  std::uint64_t fingerprint = 0;
  std::vector<Matrix> layer_inputs;  // input to each hidden equivariant layer
  std::vector<Matrix> layer_pre;     // pre-activation of each hidden layer
  Matrix hidden;                     // output of the last hidden layer
  RowVector pooled_pre;              // mean of the invariant layer output
  RowVector pooled;                  // ReLU(pooled_pre)
  std::vector<std::uint8_t> legal;
  int num_items = 0;
};

Prediction Predict(const NetParams& params, const Observation& obs);
Prediction Forward(const NetParams& params, const Observation& obs, ForwardCache& cache);

// Softmax over legal entries; illegal entries get exactly 0.
std::vector<double> MaskedSoftmax(const std::vector<double>& logits,
                                  const std::vector<std::uint8_t>& legal);

// Checkpoint: text layout header followed by little-endian float64 data.
void SaveParams(const NetParams& params, const std::string& path);
NetParams LoadParams(const std::string& path);
std::string SerializeParams(const NetParams& params);
NetParams DeserializeParams(const std::string& bytes);

}  // namespace mctses
