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

#ifndef STITCH_GRAPH_H_
#define STITCH_GRAPH_H_

#include <cstdint>
#include <istream>
#include <ostream>
#include <span>
#include <utility>
#include <vector>

#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "stitch/matrix.h"

namespace stitch {

using NodeId = int32_t;

// Undirected simple graph in compressed sparse row form. Neighbor lists are
// sorted, symmetric, and free of self-loops and duplicates. Immutable once
// built, so a single instance may be shared by concurrent readers.
class Graph {
 public:
  Graph() = default;
  // n isolated nodes.
  explicit Graph(NodeId n) : offsets_(static_cast<std::size_t>(n) + 1, 0) {}

  // Builds a graph from an arbitrary edge list: each pair is treated as
  // undirected, self-loops and repeated pairs are dropped.
  static absl::StatusOr<Graph> FromEdges(
      NodeId n, std::span<const std::pair<NodeId, NodeId>> edges);

  NodeId num_nodes() const {
    return offsets_.empty() ? 0 : static_cast<NodeId>(offsets_.size() - 1);
  }
  int64_t num_edges() const {
    return static_cast<int64_t>(targets_.size()) / 2;
  }
  std::span<const NodeId> neighbors(NodeId v) const {
    return {targets_.data() + offsets_[v],
            static_cast<std::size_t>(offsets_[v + 1] - offsets_[v])};
  }
  int64_t degree(NodeId v) const { return offsets_[v + 1] - offsets_[v]; }
  bool HasEdge(NodeId u, NodeId v) const;

  // Each undirected edge once, as (u, v) with u < v, in lexicographic order.
  std::vector<std::pair<NodeId, NodeId>> Edges() const;

  friend bool operator==(const Graph&, const Graph&) = default;

 private:
  std::vector<int64_t> offsets_;
  std::vector<NodeId> targets_;
};

// Stochastic block model: cluster proportions `pi` and symmetric link
// probabilities `B` between clusters.
struct SbmParams {
  int K = 0;
  std::vector<double> pi;
  Matrix B;

  absl::Status Validate() const;
};

// A graph together with its planted 0-based cluster labels.
struct LabeledGraph {
  Graph graph;
  int K = 0;
  std::vector<int> labels;

  friend bool operator==(const LabeledGraph&, const LabeledGraph&) = default;
};

// Cluster sizes by largest-remainder rounding of n * pi.
absl::StatusOr<std::vector<NodeId>> ProportionalSizes(std::span<const double> pi,
                                                      NodeId n);

// Samples an SBM graph. Cluster sizes are deterministic (largest-remainder
// allocation of n * pi), node order is a seeded shuffle, and each pair i < j
// is an independent Bernoulli(B[label_i][label_j]) draw.
absl::StatusOr<LabeledGraph> GenerateSbm(const SbmParams& params, NodeId n,
                                         uint64_t seed);

// Planted-partition block matrix rho * a * ((1 - r) I + r J): diagonal
// rho * a, off-diagonal rho * a * r.
absl::StatusOr<SbmParams> PlantedPartitionParams(double rho_n, double a,
                                                 double r, int K,
                                                 std::vector<double> pi);

// Expected mean degree (n - 1) * sum_kl pi_k pi_l B_kl.
double ExpectedMeanDegree(const SbmParams& params, NodeId n);

// Graph read from a text edge list, with the original node id of every
// compacted node.
struct EdgeListGraph {
  Graph graph;
  std::vector<int64_t> original_ids;
};

// Parses "u v" lines; '#' lines and blank lines are skipped. Ids may be any
// non-negative integers and are compacted to 0..n-1 in ascending order.
absl::StatusOr<EdgeListGraph> LoadEdgeList(std::istream& in);

// Writes one "u v" line per undirected edge (u < v). When `ids` is non-empty
// node v is written as ids[v].
void WriteEdgeList(const Graph& graph, std::ostream& out,
                   std::span<const int64_t> ids = {});

// One integer label per line; line i holds the label of node i.
absl::StatusOr<std::vector<int64_t>> LoadLabels(std::istream& in);
void WriteLabels(std::span<const int> labels, std::ostream& out);

// Node subset with its induced graph. Local node a is global node nodes[a].
struct SubgraphSample {
  std::vector<NodeId> nodes;
  Graph graph;

  NodeId size() const { return static_cast<NodeId>(nodes.size()); }
  // Local index of a global node, or -1 when absent.
  NodeId LocalIndex(NodeId global) const;
};

absl::StatusOr<SubgraphSample> InducedSubgraph(const Graph& graph,
                                               std::span<const NodeId> nodes);

// Sorted node set of a largest connected component. Among equally large
// components the one containing the smallest node id wins.
std::vector<NodeId> LargestConnectedComponent(const Graph& graph);

// Nodes whose degree is not exactly one.
std::vector<NodeId> NonLeafNodes(const Graph& graph);

}  // namespace stitch

#endif  // STITCH_GRAPH_H_
