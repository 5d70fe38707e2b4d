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

#include "stitch/graph.h"

#include <algorithm>
#include <cmath>
#include <deque>
#include <numeric>
#include <sstream>
#include <string>

#include "absl/strings/str_cat.h"
#include "stitch/random.h"

namespace stitch {

absl::StatusOr<Graph> Graph::FromEdges(
    NodeId n, std::span<const std::pair<NodeId, NodeId>> edges) {
  if (n < 0) return absl::InvalidArgumentError("negative node count");
  std::vector<std::pair<NodeId, NodeId>> arcs;
  arcs.reserve(edges.size() * 2);
  for (const auto& [u, v] : edges) {
    if (u < 0 || v < 0 || u >= n || v >= n) {
      return absl::InvalidArgumentError(
          absl::StrCat("edge (", u, ", ", v, ") out of range for n=", n));
    }
    if (u == v) continue;
    arcs.emplace_back(u, v);
    arcs.emplace_back(v, u);
  }
  std::sort(arcs.begin(), arcs.end());
  arcs.erase(std::unique(arcs.begin(), arcs.end()), arcs.end());

  Graph g(n);
  g.targets_.reserve(arcs.size());
  for (const auto& [u, v] : arcs) {
    ++g.offsets_[u + 1];
    g.targets_.push_back(v);
  }
  std::partial_sum(g.offsets_.begin(), g.offsets_.end(), g.offsets_.begin());
  return g;
}

bool Graph::HasEdge(NodeId u, NodeId v) const {
  auto nb = neighbors(u);
  return std::binary_search(nb.begin(), nb.end(), v);
}

std::vector<std::pair<NodeId, NodeId>> Graph::Edges() const {
  std::vector<std::pair<NodeId, NodeId>> out;
  out.reserve(targets_.size() / 2);
  for (NodeId u = 0; u < num_nodes(); ++u) {
    for (NodeId v : neighbors(u)) {
      if (u < v) out.emplace_back(u, v);
    }
  }
  return out;
}

absl::Status SbmParams::Validate() const {
  if (K < 1) return absl::InvalidArgumentError("K must be positive");
  if (static_cast<int>(pi.size()) != K) {
    return absl::InvalidArgumentError(
        absl::StrCat("pi has ", pi.size(), " entries, expected K=", K));
  }
  double total = 0.0;
  for (double p : pi) {
    if (!(p > 0.0)) {
      return absl::InvalidArgumentError("cluster proportions must be > 0");
    }
    total += p;
  }
  if (std::abs(total - 1.0) > 1e-12) {
    return absl::InvalidArgumentError(
        absl::StrCat("cluster proportions sum to ", total, ", not 1"));
  }
  if (B.rows() != static_cast<std::size_t>(K) ||
      B.cols() != static_cast<std::size_t>(K)) {
    return absl::InvalidArgumentError("B must be K x K");
  }
  for (int a = 0; a < K; ++a) {
    for (int b = 0; b < K; ++b) {
      if (!(B(a, b) >= 0.0 && B(a, b) <= 1.0)) {
        return absl::InvalidArgumentError(
            absl::StrCat("B(", a, ",", b, ")=", B(a, b), " outside [0,1]"));
      }
      if (B(a, b) != B(b, a)) {
        return absl::InvalidArgumentError("B must be symmetric");
      }
    }
  }
  return absl::OkStatus();
}

absl::StatusOr<std::vector<NodeId>> ProportionalSizes(std::span<const double> pi,
                                                      NodeId n) {
  const int K = static_cast<int>(pi.size());
  std::vector<NodeId> sizes(K);
  std::vector<double> remainder(K);
  NodeId assigned = 0;
  for (int k = 0; k < K; ++k) {
    double exact = static_cast<double>(n) * pi[k];
    sizes[k] = static_cast<NodeId>(std::floor(exact));
    remainder[k] = exact - sizes[k];
    assigned += sizes[k];
  }
  std::vector<int> order(K);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
    return remainder[a] > remainder[b];
  });
  for (int i = 0; assigned < n; ++i, ++assigned) ++sizes[order[i % K]];
  for (int k = 0; k < K; ++k) {
    if (sizes[k] < 1) {
      return absl::InvalidArgumentError(absl::StrCat(
          "cluster ", k, " is empty at n=", n, " (pi=", pi[k], ")"));
    }
  }
  return sizes;
}

absl::StatusOr<LabeledGraph> GenerateSbm(const SbmParams& params, NodeId n,
                                         uint64_t seed) {
  if (absl::Status s = params.Validate(); !s.ok()) return s;
  if (n < params.K) {
    return absl::InvalidArgumentError(
        absl::StrCat("n=", n, " is smaller than K=", params.K));
  }
  absl::StatusOr<std::vector<NodeId>> sizes = ProportionalSizes(params.pi, n);
  if (!sizes.ok()) return sizes.status();

  LabeledGraph out;
  out.K = params.K;
  out.labels.reserve(n);
  for (int k = 0; k < params.K; ++k) {
    out.labels.insert(out.labels.end(), (*sizes)[k], k);
  }
  Rng rng = MakeRng(seed);
  for (NodeId i = n - 1; i > 0; --i) {
    auto j = static_cast<NodeId>(UniformIndex(rng, static_cast<uint64_t>(i) + 1));
    std::swap(out.labels[i], out.labels[j]);
  }

  std::vector<std::pair<NodeId, NodeId>> edges;
  for (NodeId i = 0; i < n; ++i) {
    for (NodeId j = i + 1; j < n; ++j) {
      double p = params.B(out.labels[i], out.labels[j]);
      // Always consume one draw per pair so the stream layout does not
      // depend on B.
      double u = Uniform01(rng);
      if (u < p) edges.emplace_back(i, j);
    }
  }
  absl::StatusOr<Graph> g = Graph::FromEdges(n, edges);
  if (!g.ok()) return g.status();
  out.graph = *std::move(g);
  return out;
}

absl::StatusOr<SbmParams> PlantedPartitionParams(double rho_n, double a,
                                                 double r, int K,
                                                 std::vector<double> pi) {
  if (K < 1) return absl::InvalidArgumentError("K must be positive");
  if (!(r >= 0.0 && r <= 1.0)) {
    return absl::InvalidArgumentError("separation r must lie in [0,1]");
  }
  SbmParams params;
  params.K = K;
  params.pi = std::move(pi);
  params.B = Matrix(K, K, rho_n * a * r);
  for (int k = 0; k < K; ++k) params.B(k, k) = rho_n * a;
  if (absl::Status s = params.Validate(); !s.ok()) return s;
  return params;
}

double ExpectedMeanDegree(const SbmParams& params, NodeId n) {
  double d = 0.0;
  for (int a = 0; a < params.K; ++a) {
    for (int b = 0; b < params.K; ++b) {
      d += params.pi[a] * params.pi[b] * params.B(a, b);
    }
  }
  return (n - 1) * d;
}

namespace {

bool IsBlank(const std::string& line) {
  return line.find_first_not_of(" \t\r") == std::string::npos;
}

absl::Status ParseError(int64_t line_no, const std::string& what) {
  return absl::InvalidArgumentError(
      absl::StrCat("line ", line_no, ": ", what));
}

}  // namespace

absl::StatusOr<EdgeListGraph> LoadEdgeList(std::istream& in) {
  std::vector<std::pair<int64_t, int64_t>> raw;
  std::string line;
  int64_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (IsBlank(line) || line[line.find_first_not_of(" \t")] == '#') continue;
    std::istringstream fields(line);
    int64_t u = -1, v = -1;
    std::string extra;
    if (!(fields >> u >> v) || u < 0 || v < 0) {
      return ParseError(line_no, "expected two non-negative integer node ids");
    }
    if (fields >> extra) {
      return ParseError(line_no, absl::StrCat("unexpected token '", extra, "'"));
    }
    raw.emplace_back(u, v);
  }

  EdgeListGraph out;
  for (const auto& [u, v] : raw) {
    out.original_ids.push_back(u);
    out.original_ids.push_back(v);
  }
  std::sort(out.original_ids.begin(), out.original_ids.end());
  out.original_ids.erase(
      std::unique(out.original_ids.begin(), out.original_ids.end()),
      out.original_ids.end());
  auto compact = [&](int64_t id) {
    return static_cast<NodeId>(
        std::lower_bound(out.original_ids.begin(), out.original_ids.end(), id) -
        out.original_ids.begin());
  };
  std::vector<std::pair<NodeId, NodeId>> edges;
  edges.reserve(raw.size());
  for (const auto& [u, v] : raw) edges.emplace_back(compact(u), compact(v));
  absl::StatusOr<Graph> g =
      Graph::FromEdges(static_cast<NodeId>(out.original_ids.size()), edges);
  if (!g.ok()) return g.status();
  out.graph = *std::move(g);
  return out;
}

void WriteEdgeList(const Graph& graph, std::ostream& out,
                   std::span<const int64_t> ids) {
  for (const auto& [u, v] : graph.Edges()) {
    if (ids.empty()) {
      out << u << ' ' << v << '\n';
    } else {
      out << ids[u] << ' ' << ids[v] << '\n';
    }
  }
}

absl::StatusOr<std::vector<int64_t>> LoadLabels(std::istream& in) {
  std::vector<int64_t> labels;
  std::string line;
  int64_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (IsBlank(line)) continue;
    std::istringstream fields(line);
    int64_t label = 0;
    std::string extra;
    if (!(fields >> label) || (fields >> extra)) {
      return ParseError(line_no, "expected a single integer label");
    }
    labels.push_back(label);
  }
  return labels;
}

void WriteLabels(std::span<const int> labels, std::ostream& out) {
  for (int label : labels) out << label << '\n';
}

NodeId SubgraphSample::LocalIndex(NodeId global) const {
  auto it = std::lower_bound(nodes.begin(), nodes.end(), global);
  if (it == nodes.end() || *it != global) return -1;
  return static_cast<NodeId>(it - nodes.begin());
}

absl::StatusOr<SubgraphSample> InducedSubgraph(const Graph& graph,
                                               std::span<const NodeId> nodes) {
  SubgraphSample out;
  out.nodes.assign(nodes.begin(), nodes.end());
  std::sort(out.nodes.begin(), out.nodes.end());
  out.nodes.erase(std::unique(out.nodes.begin(), out.nodes.end()),
                  out.nodes.end());
  if (!out.nodes.empty() &&
      (out.nodes.front() < 0 || out.nodes.back() >= graph.num_nodes())) {
    return absl::InvalidArgumentError(
        absl::StrCat("subgraph node out of range for n=", graph.num_nodes()));
  }
  std::vector<std::pair<NodeId, NodeId>> edges;
  for (NodeId a = 0; a < out.size(); ++a) {
    // Both lists are sorted: merge instead of per-edge lookups.
    auto nb = graph.neighbors(out.nodes[a]);
    auto it = out.nodes.begin();
    for (NodeId v : nb) {
      it = std::lower_bound(it, out.nodes.end(), v);
      if (it == out.nodes.end()) break;
      if (*it == v) {
        auto b = static_cast<NodeId>(it - out.nodes.begin());
        if (a < b) edges.emplace_back(a, b);
      }
    }
  }
  absl::StatusOr<Graph> g = Graph::FromEdges(out.size(), edges);
  if (!g.ok()) return g.status();
  out.graph = *std::move(g);
  return out;
}

std::vector<NodeId> LargestConnectedComponent(const Graph& graph) {
  const NodeId n = graph.num_nodes();
  std::vector<NodeId> component(n, -1);
  NodeId best_root = -1;
  NodeId best_size = 0;
  std::deque<NodeId> queue;
  for (NodeId root = 0; root < n; ++root) {
    if (component[root] >= 0) continue;
    NodeId size = 0;
    component[root] = root;
    queue.push_back(root);
    while (!queue.empty()) {
      NodeId u = queue.front();
      queue.pop_front();
      ++size;
      for (NodeId v : graph.neighbors(u)) {
        if (component[v] < 0) {
          component[v] = root;
          queue.push_back(v);
        }
      }
    }
    // Roots are visited in increasing order, so strict '>' keeps the
    // component with the smallest node id on ties.
    if (size > best_size) {
      best_size = size;
      best_root = root;
    }
  }
  std::vector<NodeId> out;
  out.reserve(best_size);
  for (NodeId v = 0; v < n; ++v) {
    if (component[v] == best_root) out.push_back(v);
  }
  return out;
}

std::vector<NodeId> NonLeafNodes(const Graph& graph) {
  std::vector<NodeId> out;
  for (NodeId v = 0; v < graph.num_nodes(); ++v) {
    if (graph.degree(v) != 1) out.push_back(v);
  }
  return out;
}

}  // namespace stitch
