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

#ifndef STITCH_LOCAL_ESTIMATES_H_
#define STITCH_LOCAL_ESTIMATES_H_

#include <cstdint>
#include <vector>

#include "absl/status/statusor.h"
#include "stitch/base_clusterer.h"
#include "stitch/graph.h"
#include "stitch/membership.h"
#include "stitch/sampling.h"

namespace stitch {

// Wall-clock seconds spent in each phase of a stitched run.
struct PhaseTimes {
  double sampling = 0.0;
  double base = 0.0;
  double stitch = 0.0;
  double recovery = 0.0;
};

// One sampled subgraph and, when it was usable, its local clustering.
struct LocalEstimate {
  DrawnSample drawn;
  // False when the sample was inadmissible or too small to hold K clusters;
  // `labels` is then empty.
  bool used = false;
  MembershipMatrix labels;
  double seconds = 0.0;
};

// Draws T subgraphs and clusters every usable one in parallel. Sample l is
// drawn from DeriveSeed(seed, 0) and clustered with
// DeriveSeed(DeriveSeed(seed, 1), l), so results do not depend on the
// thread count. A base-clusterer error on any subgraph is returned as is
// (the lowest failing index wins).
absl::StatusOr<std::vector<LocalEstimate>> DrawAndCluster(
    const Graph& graph, int K, const SamplerSpec& sampler, int T,
    const BaseClusterer& base, uint64_t seed, PhaseTimes& times);

// Same as above for caller-provided samples.
absl::StatusOr<std::vector<LocalEstimate>> ClusterSamples(
    std::vector<DrawnSample> samples, int K, const BaseClusterer& base,
    uint64_t seed);

int CountUsed(const std::vector<LocalEstimate>& locals);

}  // namespace stitch

#endif  // STITCH_LOCAL_ESTIMATES_H_
