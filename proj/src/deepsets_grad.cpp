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

#include "mctses/deepsets_grad.hpp"

#include "mctses/error.hpp"

namespace mctses {
namespace {

// Gradient of Z = X A + 1 b + 1 (1^T X) C given dL/dZ. Returns dL/dX.
Matrix EquivariantBackward(const Matrix& x, const LayerParams& layer, const Matrix& dz,
                           LayerParams& grad) {
  const RowVector sum_x = x.colwise().sum();
  const RowVector sum_dz = dz.colwise().sum();
  grad.A += x.transpose() * dz;
  grad.C += sum_x.transpose() * sum_dz;
  grad.b += sum_dz;
  Matrix dx = dz * layer.A.transpose();
  dx.rowwise() += sum_dz * layer.C.transpose();
  return dx;
}

Matrix ReluMask(const Matrix& pre) { return (pre.array() > 0.0).cast<double>().matrix(); }

}  // namespace

std::vector<double> Backward(const NetParams& params, const ForwardCache& cache,
                             double d_value, const std::vector<double>& d_logits) {
  if (cache.num_items == 0 || cache.fingerprint != Fingerprint(params)) {
    throw ContractError("backward: cache does not belong to these parameters");
  }
  if (d_logits.size() != cache.legal.size()) {
    throw ContractError("backward: d_logits has wrong length");
  }
  const int n = cache.num_items;
  const int h = params.dims.hidden;
  NetParams grad = ZeroParams(params.dims);

  Vector dl(static_cast<Eigen::Index>(d_logits.size()));
  for (std::size_t i = 0; i < d_logits.size(); ++i) {
    dl(static_cast<Eigen::Index>(i)) = cache.legal[i] ? d_logits[i] : 0.0;
  }

  grad.value_w.col(0) = cache.pooled.transpose() * d_value;
  grad.value_b(0) = d_value;
  RowVector d_pooled = d_value * params.value_w.col(0).transpose();

  Matrix d_hidden = Matrix::Zero(n, h);
  if (params.dims.mode == ActionMode::kSetIndexed) {
    grad.policy_w.col(0) = cache.hidden.transpose() * dl;
    grad.policy_b(0) = dl.sum();
    d_hidden += dl * params.policy_w.col(0).transpose();
  } else {
    grad.policy_w = cache.pooled.transpose() * dl.transpose();
    grad.policy_b = dl.transpose();
    d_pooled += dl.transpose() * params.policy_w.transpose();
  }

  const RowVector d_pooled_pre =
      d_pooled.cwiseProduct((cache.pooled_pre.array() > 0.0).cast<double>().matrix());
  Matrix d_inv(n, h);
  d_inv.rowwise() = d_pooled_pre / static_cast<double>(n);
  d_hidden += EquivariantBackward(cache.hidden, params.invariant, d_inv, grad.invariant);

  for (std::size_t i = params.equivariant.size(); i-- > 0;) {
    const Matrix d_pre = d_hidden.cwiseProduct(ReluMask(cache.layer_pre[i]));
    d_hidden = EquivariantBackward(cache.layer_inputs[i], params.equivariant[i], d_pre,
                                   grad.equivariant[i]);
  }
  return FlattenValues(grad);
}

}  // namespace mctses
