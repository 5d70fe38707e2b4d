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

#ifndef STITCH_KERNELS_H_
#define STITCH_KERNELS_H_

#include <span>
#include <vector>

#include "stitch/graph.h"
#include "stitch/matrix.h"

// Data-parallel inner loops. Every kernel has an OpenMP version and a plain
// serial reference; both visit each output entry's terms in the same order, so
// their results are bit-identical for any thread count.
namespace stitch::kernels {

// y = a * x.
void DenseMultiply(const Matrix& a, const Matrix& x, Matrix& y);
void DenseMultiplySerial(const Matrix& a, const Matrix& x, Matrix& y);

// Local clustering of one subgraph, as seen by the co-membership accumulator.
// The weight of local pair (a, b) is base_weight + node_weight[a] +
// node_weight[b]; node_weight may be empty.
struct Patch {
  std::span<const NodeId> nodes;
  std::span<const int> labels;
  double base_weight = 1.0;
  std::span<const double> node_weight;
};

// For every patch and every ordered local pair (a, b), including a == b:
//   count(g_a, g_b) += w_ab,  sum(g_a, g_b) += w_ab * [labels agree].
// Patches are applied in order.
void AccumulatePatches(std::span<const Patch> patches, Matrix& sum,
                       Matrix& count);
void AccumulatePatchesSerial(std::span<const Patch> patches, Matrix& sum,
                             Matrix& count);

// overlap(a, b) = |sets[a] intersect sets[b]| for sorted node sets over
// 0..n-1. The diagonal holds the set sizes.
Matrix PairwiseOverlaps(std::span<const std::vector<NodeId>> sets, NodeId n);
Matrix PairwiseOverlapsSerial(std::span<const std::vector<NodeId>> sets);

}  // namespace stitch::kernels

#endif  // STITCH_KERNELS_H_
