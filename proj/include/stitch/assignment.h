// Copyright 2026 The Stitch Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef STITCH_ASSIGNMENT_H_
#define STITCH_ASSIGNMENT_H_

#include <vector>

#include "stitch/matrix.h"

namespace stitch {

// Exact maximum-weight perfect matching on a square weight matrix
// (Hungarian algorithm with potentials, O(K^3)). Returns col[row].
std::vector<int> MaxWeightAssignment(const Matrix& weights);

}  // namespace stitch

#endif  // STITCH_ASSIGNMENT_H_
