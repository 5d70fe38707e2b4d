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

#include "stitch/sampling.h"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "absl/strings/str_cat.h"
#include "stitch/random.h"

namespace stitch {

absl::Status SamplerSpec::Validate() const {
  if (m < 1) return absl::InvalidArgumentError("m must be >= 1");
  if (h < 1) return absl::InvalidArgumentError("h must be >= 1");
  if (m_star < 1) return absl::InvalidArgumentError("m_star must be >= 1");
  if (!(quantile >= 0.0 && quantile < 1.0)) {
    return absl::InvalidArgumentError("quantile must lie in [0,1)");
  }
  return absl::OkStatus();
}

absl::StatusOr<SamplerScheme> ParseSamplerScheme(const std::string& name) {
  if (name == "random_m") return SamplerScheme::kRandomM;
  if (name == "h_hop") return SamplerScheme::kHHop;
  if (name == "ego") return SamplerScheme::kEgo;
  if (name == "onion") return SamplerScheme::kOnion;
  return absl::InvalidArgumentError(absl::StrCat("unknown sampler '", name, "'"));
}

absl::StatusOr<RootSelection> ParseRootSelection(const std::string& name) {
  if (name == "uniform") return RootSelection::kUniform;
  if (name == "degree_proportional") return RootSelection::kDegreeProportional;
  if (name == "degree_quantile") return RootSelection::kDegreeQuantile;
  return absl::InvalidArgumentError(
      absl::StrCat("unknown root selection '", name, "'"));
}

std::string SamplerSchemeName(SamplerScheme scheme) {
  switch (scheme) {
    case SamplerScheme::kRandomM:
      return "random_m";
    case SamplerScheme::kHHop:
      return "h_hop";
    case SamplerScheme::kEgo:
      return "ego";
    case SamplerScheme::kOnion:
      return "onion";
  }
  return "unknown";
}

absl::StatusOr<std::vector<NodeId>> SampleRandomM(const Graph& graph, int m,
                                                  uint64_t seed) {
  const NodeId n = graph.num_nodes();
  if (m < 0 || m > n) {
    return absl::InvalidArgumentError(
        absl::StrCat("cannot sample m=", m, " of n=", n, " nodes"));
  }
  std::vector<NodeId> pool(n);
  std::iota(pool.begin(), pool.end(), 0);
  Rng rng = MakeRng(seed);
  // Partial Fisher-Yates: the first m slots end up a uniform m-subset.
  for (int i = 0; i < m; ++i) {
    auto j = i + static_cast<NodeId>(UniformIndex(rng, n - i));
    std::swap(pool[i], pool[j]);
  }
  pool.resize(m);
  std::sort(pool.begin(), pool.end());
  return pool;
}

std::vector<NodeId> SampleHHop(const Graph& graph, NodeId root, int h) {
  std::vector<NodeId> frontier = {root};
  std::vector<NodeId> out = {root};
  std::vector<char> seen(graph.num_nodes(), 0);
  seen[root] = 1;
  for (int depth = 0; depth < h && !frontier.empty(); ++depth) {
    std::vector<NodeId> next;
    for (NodeId u : frontier) {
      for (NodeId v : graph.neighbors(u)) {
        if (!seen[v]) {
          seen[v] = 1;
          next.push_back(v);
        }
      }
    }
    out.insert(out.end(), next.begin(), next.end());
    frontier = std::move(next);
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<NodeId> SampleEgo(const Graph& graph, NodeId root) {
  auto nb = graph.neighbors(root);
  return {nb.begin(), nb.end()};
}

std::vector<NodeId> SampleOnion(const Graph& graph, NodeId root, int h) {
  std::vector<char> in_onion(graph.num_nodes(), 0);
  in_onion[root] = 1;  // excluded from every shell
  std::vector<NodeId> shell = SampleEgo(graph, root);
  std::vector<NodeId> onion = shell;
  for (NodeId v : shell) in_onion[v] = 1;
  for (int level = 2; level <= h && !shell.empty(); ++level) {
    std::vector<NodeId> next;
    for (NodeId u : shell) {
      for (NodeId v : graph.neighbors(u)) {
        if (!in_onion[v]) {
          in_onion[v] = 1;
          next.push_back(v);
        }
      }
    }
    onion.insert(onion.end(), next.begin(), next.end());
    shell = std::move(next);
  }
  std::sort(onion.begin(), onion.end());
  return onion;
}

absl::StatusOr<std::vector<NodeId>> SelectRoots(const Graph& graph,
                                                const SamplerSpec& spec, int T,
                                                uint64_t seed) {
  if (T < 1) return absl::InvalidArgumentError("T must be >= 1");
  const NodeId n = graph.num_nodes();
  std::vector<NodeId> pool;
  std::vector<int64_t> cumulative;  // degree-proportional only
  switch (spec.roots) {
    case RootSelection::kUniform:
      pool.resize(n);
      std::iota(pool.begin(), pool.end(), 0);
      break;
    case RootSelection::kDegreeProportional: {
      int64_t total = 0;
      for (NodeId v = 0; v < n; ++v) {
        if (graph.degree(v) == 0) continue;
        pool.push_back(v);
        total += graph.degree(v);
        cumulative.push_back(total);
      }
      break;
    }
    case RootSelection::kDegreeQuantile: {
      if (n == 0) break;
      std::vector<int64_t> degrees(n);
      for (NodeId v = 0; v < n; ++v) degrees[v] = graph.degree(v);
      std::sort(degrees.begin(), degrees.end());
      // Lower empirical quantile: smallest degree whose CDF reaches q.
      auto idx = static_cast<std::size_t>(
          std::max(0.0, std::ceil(spec.quantile * n) - 1.0));
      const int64_t cut = degrees[std::min(idx, degrees.size() - 1)];
      for (NodeId v = 0; v < n; ++v) {
        if (graph.degree(v) > cut) pool.push_back(v);
      }
      break;
    }
  }
  if (pool.empty()) {
    return absl::InvalidArgumentError("no eligible root nodes");
  }
  std::vector<NodeId> roots(T);
  for (int l = 0; l < T; ++l) {
    Rng rng = MakeRng(DeriveSeed(seed, l));
    if (cumulative.empty()) {
      roots[l] = pool[UniformIndex(rng, pool.size())];
    } else {
      auto ticket = static_cast<int64_t>(UniformIndex(rng, cumulative.back()));
      auto it = std::upper_bound(cumulative.begin(), cumulative.end(), ticket);
      roots[l] = pool[it - cumulative.begin()];
    }
  }
  return roots;
}

absl::StatusOr<std::vector<DrawnSample>> DrawSubgraphs(const Graph& graph,
                                                       const SamplerSpec& spec,
                                                       int T, uint64_t seed) {
  if (absl::Status s = spec.Validate(); !s.ok()) return s;
  if (T < 1) return absl::InvalidArgumentError("T must be >= 1");
  if (spec.scheme == SamplerScheme::kRandomM && spec.m > graph.num_nodes()) {
    return absl::InvalidArgumentError(absl::StrCat(
        "m=", spec.m, " exceeds the node count ", graph.num_nodes()));
  }
  std::vector<NodeId> roots;
  if (spec.scheme != SamplerScheme::kRandomM) {
    absl::StatusOr<std::vector<NodeId>> r = SelectRoots(graph, spec, T, seed);
    if (!r.ok()) return r.status();
    roots = *std::move(r);
  }

  std::vector<DrawnSample> out(T);
#pragma omp parallel for schedule(dynamic)
  for (int l = 0; l < T; ++l) {
    std::vector<NodeId> nodes;
    switch (spec.scheme) {
      case SamplerScheme::kRandomM:
        // m <= n was checked above.
        nodes = *SampleRandomM(graph, spec.m, DeriveSeed(seed, l));
        break;
      case SamplerScheme::kHHop:
        nodes = SampleHHop(graph, roots[l], spec.h);
        break;
      case SamplerScheme::kEgo:
        nodes = SampleEgo(graph, roots[l]);
        break;
      case SamplerScheme::kOnion:
        nodes = SampleOnion(graph, roots[l], spec.h);
        break;
    }
    // Nodes come from the graph itself, so the induced subgraph cannot fail.
    out[l].sample = *InducedSubgraph(graph, nodes);
    out[l].admissible = out[l].sample.size() >= spec.m_star;
    out[l].root = roots.empty() ? -1 : roots[l];
  }
  return out;
}

}  // namespace stitch
