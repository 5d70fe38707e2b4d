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

#include "stitch/kernels.h"

#include <algorithm>
#include <cstdint>
#include <utility>

namespace stitch::kernels {

namespace {

inline void MultiplyRow(const Matrix& a, const Matrix& x, Matrix& y,
                        std::size_t i) {
  auto out = y.row(i);
  std::fill(out.begin(), out.end(), 0.0);
  auto arow = a.row(i);
  for (std::size_t k = 0; k < arow.size(); ++k) {
    const double aik = arow[k];
    if (aik == 0.0) continue;
    auto xrow = x.row(k);
    for (std::size_t j = 0; j < out.size(); ++j) out[j] += aik * xrow[j];
  }
}

inline double PairWeight(const Patch& p, std::size_t a, std::size_t b) {
  double w = p.base_weight;
  if (!p.node_weight.empty()) w += p.node_weight[a] + p.node_weight[b];
  return w;
}

}  // namespace

void DenseMultiply(const Matrix& a, const Matrix& x, Matrix& y) {
  const auto rows = static_cast<int64_t>(a.rows());
#pragma omp parallel for schedule(static)
  for (int64_t i = 0; i < rows; ++i) MultiplyRow(a, x, y, i);
}

void DenseMultiplySerial(const Matrix& a, const Matrix& x, Matrix& y) {
  for (std::size_t i = 0; i < a.rows(); ++i) MultiplyRow(a, x, y, i);
}

void AccumulatePatches(std::span<const Patch> patches, Matrix& sum,
                       Matrix& count) {
  const auto n = static_cast<NodeId>(sum.rows());
  // Invert the patch lists: for each global node, the (patch, local index)
  // pairs containing it, in patch order. Each thread then owns whole rows.
  std::vector<int64_t> offsets(static_cast<std::size_t>(n) + 1, 0);
  for (const Patch& p : patches) {
    for (NodeId g : p.nodes) ++offsets[g + 1];
  }
  for (NodeId v = 0; v < n; ++v) offsets[v + 1] += offsets[v];
  std::vector<std::pair<int, int>> entries(offsets[n]);
  std::vector<int64_t> fill(offsets.begin(), offsets.end() - 1);
  for (std::size_t p = 0; p < patches.size(); ++p) {
    const auto& nodes = patches[p].nodes;
    for (std::size_t a = 0; a < nodes.size(); ++a) {
      entries[fill[nodes[a]]++] = {static_cast<int>(p), static_cast<int>(a)};
    }
  }

#pragma omp parallel for schedule(dynamic, 16)
  for (NodeId i = 0; i < n; ++i) {
    auto srow = sum.row(i);
    auto crow = count.row(i);
    for (int64_t e = offsets[i]; e < offsets[i + 1]; ++e) {
      const auto [pi, a] = entries[e];
      const Patch& p = patches[pi];
      const int la = p.labels[a];
      for (std::size_t b = 0; b < p.nodes.size(); ++b) {
        const double w = PairWeight(p, a, b);
        const NodeId j = p.nodes[b];
        crow[j] += w;
        if (p.labels[b] == la) srow[j] += w;
      }
    }
  }
}

void AccumulatePatchesSerial(std::span<const Patch> patches, Matrix& sum,
                             Matrix& count) {
  for (const Patch& p : patches) {
    for (std::size_t a = 0; a < p.nodes.size(); ++a) {
      for (std::size_t b = 0; b < p.nodes.size(); ++b) {
        const double w = PairWeight(p, a, b);
        count(p.nodes[a], p.nodes[b]) += w;
        if (p.labels[a] == p.labels[b]) sum(p.nodes[a], p.nodes[b]) += w;
      }
    }
  }
}

Matrix PairwiseOverlaps(std::span<const std::vector<NodeId>> sets, NodeId n) {
  const auto T = static_cast<int64_t>(sets.size());
  Matrix overlap(T, T);
#pragma omp parallel
  {
    std::vector<char> mark(n, 0);
#pragma omp for schedule(dynamic)
    for (int64_t a = 0; a < T; ++a) {
      for (NodeId v : sets[a]) mark[v] = 1;
      for (int64_t b = a; b < T; ++b) {
        int64_t shared = 0;
        for (NodeId v : sets[b]) shared += mark[v];
        overlap(a, b) = static_cast<double>(shared);
        overlap(b, a) = static_cast<double>(shared);
      }
      for (NodeId v : sets[a]) mark[v] = 0;
    }
  }
  return overlap;
}

Matrix PairwiseOverlapsSerial(std::span<const std::vector<NodeId>> sets) {
  const std::size_t T = sets.size();
  Matrix overlap(T, T);
  for (std::size_t a = 0; a < T; ++a) {
    for (std::size_t b = a; b < T; ++b) {
      std::size_t shared = 0;
      auto i = sets[a].begin();
      auto j = sets[b].begin();
      while (i != sets[a].end() && j != sets[b].end()) {
        if (*i < *j) {
          ++i;
        } else if (*j < *i) {
          ++j;
        } else {
          ++shared;
          ++i;
          ++j;
        }
      }
      overlap(a, b) = overlap(b, a) = static_cast<double>(shared);
    }
  }
  return overlap;
}

}  // namespace stitch::kernels
