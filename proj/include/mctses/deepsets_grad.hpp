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

#include <vector>

#include "mctses/deepsets.hpp"

namespace mctses {

/// Reverse pass of Forward: the gradient of d_value * value + d_logits . logits
/// with respect to every parameter, laid out as Flatten(params).values.
/// Masked logits contribute nothing. Throws ContractError when `cache` was
/// produced with different parameters.
std::vector<double> Backward(const NetParams& params, const ForwardCache& cache,
                             double d_value, const std::vector<double>& d_logits);

}  // namespace mctses
