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

#ifndef STITCH_GALE_H_
#define STITCH_GALE_H_

#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "stitch/base_clusterer.h"
#include "stitch/graph.h"
#include "stitch/local_estimates.h"
#include "stitch/matrix.h"
#include "stitch/membership.h"
#include "stitch/sampling.h"

namespace stitch {

// Subgraphs as vertices, joined when they share at least m1 nodes.
struct SuperGraph {
  int m1 = 1;
  // overlap(a, b) = |S_a intersect S_b|; the diagonal holds |S_a|.
  Matrix overlap;
  // Neighbors by decreasing overlap, then increasing index.
  std::vector<std::vector<int>> adjacency;

  int size() const { return static_cast<int>(adjacency.size()); }
  int64_t num_edges() const;
};

SuperGraph BuildSuperGraph(std::span<const std::vector<NodeId>> sets, NodeId n,
                           int m1);

// Super-graph restricted to the given candidate pairs; overlaps of the
// candidates are exact, all other pairs are treated as disjoint.
SuperGraph BuildSuperGraphFromCandidates(
    std::span<const std::vector<NodeId>> sets, int m1,
    std::span<const std::pair<int, int>> candidates);

// Pairs (a < b) whose characteristic vectors share a signature in at least
// one of `bands` tables. Each table concatenates `bits` signs of Gaussian
// projections.
std::vector<std::pair<int, int>> LshOverlapCandidates(
    std::span<const std::vector<NodeId>> sets, NodeId n, int bands, int bits,
    uint64_t seed);

struct Traversal {
  // Walk over a DFS spanning tree: each step moves to a child or back to the
  // parent, so consecutive entries are tree-adjacent.
  std::vector<int> walk;
  // Subgraphs outside the start's component, ascending.
  std::vector<int> uncovered;
};

Traversal SpanningTraversal(const SuperGraph& sg, int start);

struct AlignOutcome {
  // Maps current labels to reference labels.
  Permutation perm;
  bool accepted = false;
  double agreement = 0.0;
};

// Aligns `current` to `reference` on a common node set (row i of both refers
// to the same node). The reference is hardened by RoundSoft first.
AlignOutcome AlignStep(const MembershipMatrix& current,
                       const SoftMembership& reference,
                       double validation_threshold);

enum class MatchTarget { kUnion, kPrevious };

struct GaleConfig {
  int T = 1;
  SamplerSpec sampler;
  // tau = theta * sum_l |S_l| / n (theta T m / n for random m-subsets).
  double theta = 0.5;
  // Overrides theta when set.
  std::optional<double> tau;
  double validation_threshold = 0.55;
  int n_traversals = 1;
  MatchTarget match_target = MatchTarget::kUnion;
  // Super-graph threshold; default ceil(mean|S|^2 / 2n).
  std::optional<int> m1;
  // Minimum vote count for a node to serve as reference during the walk.
  double walk_threshold = 0.0;
  bool use_lsh = false;
  // 0 means ceil(sqrt(T)).
  int lsh_bands = 0;
  int lsh_bits = 2;

  absl::Status Validate() const;
};

struct GaleStep {
  int subgraph = 0;
  int overlap = 0;
  double agreement = 0.0;
  bool accepted = false;
};

struct GaleTraversalReport {
  int start = 0;
  std::vector<int> walk;
  std::vector<GaleStep> steps;
  std::vector<int> uncovered_subgraphs;
};

struct GaleResult {
  // K labels, or K + 1 when some node ends below the vote threshold; those
  // nodes carry label K.
  MembershipMatrix membership;
  // n x K; rows of nodes below the threshold are zero.
  SoftMembership soft;
  // Vote count per node, summed over traversals.
  std::vector<double> votes;
  double tau = 0.0;
  int uncovered_nodes = 0;
  int m1 = 0;
  int64_t supergraph_edges = 0;
  std::vector<GaleTraversalReport> traversals;
  // Permutation applied to each subgraph's labels in the first traversal;
  // empty for subgraphs that were not accepted.
  std::vector<Permutation> aligned;
  std::vector<LocalEstimate> locals;
  PhaseTimes times;
};

absl::StatusOr<GaleResult> RunGale(const Graph& graph, int K,
                                   const GaleConfig& config,
                                   const BaseClusterer& base, uint64_t seed);

// Stitching only, for precomputed local estimates.
absl::StatusOr<GaleResult> StitchGale(NodeId n, int K, const GaleConfig& config,
                                      std::vector<LocalEstimate> locals,
                                      uint64_t seed);

}  // namespace stitch

#endif  // STITCH_GALE_H_
