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

#ifndef STITCH_SAMPLING_H_
#define STITCH_SAMPLING_H_

#include <cstdint>
#include <string>
#include <vector>

#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "stitch/graph.h"

namespace stitch {

enum class SamplerScheme { kRandomM, kHHop, kEgo, kOnion };
enum class RootSelection { kUniform, kDegreeProportional, kDegreeQuantile };

struct SamplerSpec {
  SamplerScheme scheme = SamplerScheme::kRandomM;
  // Subset size for kRandomM.
  int m = 1;
  // Hop count for kHHop and kOnion.
  int h = 1;
  RootSelection roots = RootSelection::kUniform;
  // Lower quantile for kDegreeQuantile: roots must have degree strictly
  // above it.
  double quantile = 0.1;
  // Samples smaller than this are kept but flagged inadmissible.
  int m_star = 1;

  absl::Status Validate() const;
};

absl::StatusOr<SamplerScheme> ParseSamplerScheme(const std::string& name);
absl::StatusOr<RootSelection> ParseRootSelection(const std::string& name);
std::string SamplerSchemeName(SamplerScheme scheme);

// Uniform m-subset without replacement, sorted.
absl::StatusOr<std::vector<NodeId>> SampleRandomM(const Graph& graph, int m,
                                                  uint64_t seed);

// Nodes within geodesic distance h of root, root included, sorted.
std::vector<NodeId> SampleHHop(const Graph& graph, NodeId root, int h);

// Neighbors of root (root excluded).
std::vector<NodeId> SampleEgo(const Graph& graph, NodeId root);

// h-hop onion neighborhood as a node set: the ego network of root grown by
// successive shells of ego networks, root excluded.
std::vector<NodeId> SampleOnion(const Graph& graph, NodeId root, int h);

// T roots drawn with replacement; root l uses the stream DeriveSeed(seed, l),
// so any prefix of the sequence is independent of T.
absl::StatusOr<std::vector<NodeId>> SelectRoots(const Graph& graph,
                                                const SamplerSpec& spec, int T,
                                                uint64_t seed);

struct DrawnSample {
  SubgraphSample sample;
  bool admissible = false;
  // Root of a neighborhood sample; -1 for random subsets.
  NodeId root = -1;
};

// T samples under `spec`. Sample l depends only on (seed, l).
absl::StatusOr<std::vector<DrawnSample>> DrawSubgraphs(const Graph& graph,
                                                       const SamplerSpec& spec,
                                                       int T, uint64_t seed);

}  // namespace stitch

#endif  // STITCH_SAMPLING_H_
