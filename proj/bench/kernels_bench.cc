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

// Serial reference kernels against their OpenMP versions. Thread count comes
// from OMP_NUM_THREADS.

#include <algorithm>
#include <vector>

#include "benchmark/benchmark.h"
#include "stitch/kernels.h"
#include "stitch/random.h"

namespace stitch {
namespace {

struct Samples {
  std::vector<std::vector<NodeId>> nodes;
  std::vector<std::vector<int>> labels;
  std::vector<kernels::Patch> patches;
};

Samples RandomSamples(NodeId n, int m, int T, int K) {
  Samples s;
  Rng rng = MakeRng(17);
  std::vector<NodeId> all(n);
  for (NodeId i = 0; i < n; ++i) all[i] = i;
  for (int l = 0; l < T; ++l) {
    std::shuffle(all.begin(), all.end(), rng);
    std::vector<NodeId> pick(all.begin(), all.begin() + m);
    std::sort(pick.begin(), pick.end());
    std::vector<int> lab(m);
    for (int& x : lab) x = static_cast<int>(UniformIndex(rng, K));
    s.nodes.push_back(std::move(pick));
    s.labels.push_back(std::move(lab));
  }
  for (int l = 0; l < T; ++l) {
    s.patches.push_back({s.nodes[l], s.labels[l], 1.0, {}});
  }
  return s;
}

template <bool kSerial>
void BM_AccumulatePatches(benchmark::State& state) {
  const NodeId n = state.range(0);
  Samples s = RandomSamples(n, n / 4, 40, 4);
  for (auto _ : state) {
    Matrix sum(n, n), count(n, n);
    if constexpr (kSerial) {
      kernels::AccumulatePatchesSerial(s.patches, sum, count);
    } else {
      kernels::AccumulatePatches(s.patches, sum, count);
    }
    benchmark::DoNotOptimize(sum.data().data());
  }
}
BENCHMARK(BM_AccumulatePatches<true>)->Name("AccumulatePatches/serial")->Arg(500)->Arg(1000);
BENCHMARK(BM_AccumulatePatches<false>)->Name("AccumulatePatches/omp")->Arg(500)->Arg(1000);

template <bool kSerial>
void BM_PairwiseOverlaps(benchmark::State& state) {
  const NodeId n = 2000;
  Samples s = RandomSamples(n, 300, state.range(0), 2);
  for (auto _ : state) {
    Matrix o = kSerial ? kernels::PairwiseOverlapsSerial(s.nodes)
                       : kernels::PairwiseOverlaps(s.nodes, n);
    benchmark::DoNotOptimize(o.data().data());
  }
}
BENCHMARK(BM_PairwiseOverlaps<true>)->Name("PairwiseOverlaps/serial")->Arg(100)->Arg(400);
BENCHMARK(BM_PairwiseOverlaps<false>)->Name("PairwiseOverlaps/omp")->Arg(100)->Arg(400);

template <bool kSerial>
void BM_DenseMultiply(benchmark::State& state) {
  const std::size_t n = state.range(0);
  Rng rng = MakeRng(3);
  Matrix a(n, n), x(n, 8), y(n, 8);
  for (double& v : a.data()) v = Uniform01(rng);
  for (double& v : x.data()) v = Uniform01(rng);
  for (auto _ : state) {
    if constexpr (kSerial) {
      kernels::DenseMultiplySerial(a, x, y);
    } else {
      kernels::DenseMultiply(a, x, y);
    }
    benchmark::DoNotOptimize(y.data().data());
  }
}
BENCHMARK(BM_DenseMultiply<true>)->Name("DenseMultiply/serial")->Arg(1000)->Arg(3000);
BENCHMARK(BM_DenseMultiply<false>)->Name("DenseMultiply/omp")->Arg(1000)->Arg(3000);

}  // namespace
}  // namespace stitch

BENCHMARK_MAIN();
