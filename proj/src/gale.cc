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

#include "stitch/gale.h"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>
#include <random>
#include <unordered_map>

#include "absl/strings/str_cat.h"
#include "stitch/kernels.h"
#include "stitch/random.h"

namespace stitch {

namespace {

double SecondsSince(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
      .count();
}

void FillAdjacency(SuperGraph& sg) {
  const int T = static_cast<int>(sg.overlap.rows());
  sg.adjacency.assign(T, {});
  for (int a = 0; a < T; ++a) {
    for (int b = 0; b < T; ++b) {
      if (a != b && sg.overlap(a, b) >= sg.m1) sg.adjacency[a].push_back(b);
    }
    std::stable_sort(sg.adjacency[a].begin(), sg.adjacency[a].end(),
                     [&](int x, int y) { return sg.overlap(a, x) > sg.overlap(a, y); });
  }
}

std::size_t SortedIntersectionSize(const std::vector<NodeId>& a,
                                   const std::vector<NodeId>& b) {
  std::size_t shared = 0;
  auto i = a.begin();
  auto j = b.begin();
  while (i != a.end() && j != b.end()) {
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
  return shared;
}

// Votes of one traversal.
struct WalkOutput {
  Matrix votes;
  std::vector<double> count;
  std::vector<Permutation> perms;
  GaleTraversalReport report;
};

WalkOutput Walk(NodeId n, int K, const GaleConfig& config,
                const std::vector<LocalEstimate>& locals, const SuperGraph& sg,
                int start) {
  const int T = static_cast<int>(locals.size());
  WalkOutput out;
  out.votes = Matrix(n, K);
  out.count.assign(n, 0.0);
  out.perms.assign(T, {});
  Traversal trav = SpanningTraversal(sg, start);
  out.report.start = start;
  out.report.walk = trav.walk;
  out.report.uncovered_subgraphs = trav.uncovered;

  std::vector<char> seen(T, 0);
  int last_accepted = -1;
  for (std::size_t pos = 0; pos < trav.walk.size(); ++pos) {
    const int x = trav.walk[pos];
    if (seen[x]) continue;
    seen[x] = 1;
    const LocalEstimate& est = locals[x];
    if (!est.used) continue;
    const std::vector<NodeId>& nodes = est.drawn.sample.nodes;

    GaleStep step;
    step.subgraph = x;
    Permutation perm;
    if (last_accepted < 0) {
      perm.resize(K);
      std::iota(perm.begin(), perm.end(), 0);
      step.overlap = 0;
      step.agreement = 1.0;
      step.accepted = true;
    } else {
      std::vector<int> local_rows;
      SoftMembership reference;
      if (config.match_target == MatchTarget::kUnion) {
        for (std::size_t a = 0; a < nodes.size(); ++a) {
          const double c = out.count[nodes[a]];
          if (c > 0.0 && c >= config.walk_threshold) local_rows.push_back(a);
        }
        reference = Matrix(local_rows.size(), K);
        for (std::size_t r = 0; r < local_rows.size(); ++r) {
          const NodeId v = nodes[local_rows[r]];
          for (int k = 0; k < K; ++k) {
            reference(r, k) = out.votes(v, k) / out.count[v];
          }
        }
      } else {
        const int prev = trav.walk[pos - 1];
        const int ref = out.perms[prev].empty() ? last_accepted : prev;
        const std::vector<NodeId>& ref_nodes = locals[ref].drawn.sample.nodes;
        const Permutation& ref_perm = out.perms[ref];
        std::vector<int> ref_labels;
        std::size_t a = 0, b = 0;
        while (a < nodes.size() && b < ref_nodes.size()) {
          if (nodes[a] < ref_nodes[b]) {
            ++a;
          } else if (ref_nodes[b] < nodes[a]) {
            ++b;
          } else {
            local_rows.push_back(static_cast<int>(a));
            ref_labels.push_back(ref_perm[locals[ref].labels.label(b)]);
            ++a;
            ++b;
          }
        }
        reference = Matrix(local_rows.size(), K);
        for (std::size_t r = 0; r < ref_labels.size(); ++r) {
          reference(r, ref_labels[r]) = 1.0;
        }
      }
      MembershipMatrix cur(static_cast<int>(local_rows.size()), K);
      for (std::size_t r = 0; r < local_rows.size(); ++r) {
        cur.set_label(static_cast<int>(r), est.labels.label(local_rows[r]));
      }
      AlignOutcome outcome = AlignStep(cur, reference, config.validation_threshold);
      step.overlap = static_cast<int>(local_rows.size());
      step.agreement = outcome.agreement;
      step.accepted = outcome.accepted;
      perm = std::move(outcome.perm);
    }
    out.report.steps.push_back(step);
    if (!step.accepted) continue;
    for (std::size_t a = 0; a < nodes.size(); ++a) {
      out.votes(nodes[a], perm[est.labels.label(a)]) += 1.0;
      out.count[nodes[a]] += 1.0;
    }
    out.perms[x] = std::move(perm);
    last_accepted = x;
  }
  return out;
}

int RowArgmax(const Matrix& m, std::size_t row) {
  int best = 0;
  for (std::size_t k = 1; k < m.cols(); ++k) {
    if (m(row, k) > m(row, best)) best = static_cast<int>(k);
  }
  return best;
}

// Permutes the label columns of `walk` into the frame of `first` using the
// nodes both traversals covered.
void AlignWalk(const WalkOutput& first, WalkOutput& walk, int K) {
  const std::size_t n = first.count.size();
  Matrix confusion(K, K);
  for (std::size_t v = 0; v < n; ++v) {
    if (first.count[v] > 0.0 && walk.count[v] > 0.0) {
      confusion(RowArgmax(walk.votes, v), RowArgmax(first.votes, v)) += 1.0;
    }
  }
  const Permutation perm = MatchPermutation(confusion);
  Matrix moved(n, K);
  for (std::size_t v = 0; v < n; ++v) {
    for (int k = 0; k < K; ++k) moved(v, perm[k]) = walk.votes(v, k);
  }
  walk.votes = std::move(moved);
}

}  // namespace

int64_t SuperGraph::num_edges() const {
  int64_t twice = 0;
  for (const auto& nbrs : adjacency) twice += static_cast<int64_t>(nbrs.size());
  return twice / 2;
}

SuperGraph BuildSuperGraph(std::span<const std::vector<NodeId>> sets, NodeId n,
                           int m1) {
  SuperGraph sg;
  sg.m1 = m1;
  sg.overlap = kernels::PairwiseOverlaps(sets, n);
  FillAdjacency(sg);
  return sg;
}

SuperGraph BuildSuperGraphFromCandidates(
    std::span<const std::vector<NodeId>> sets, int m1,
    std::span<const std::pair<int, int>> candidates) {
  const std::size_t T = sets.size();
  SuperGraph sg;
  sg.m1 = m1;
  sg.overlap = Matrix(T, T);
  for (std::size_t a = 0; a < T; ++a) sg.overlap(a, a) = sets[a].size();
  for (const auto& [a, b] : candidates) {
    const double shared = SortedIntersectionSize(sets[a], sets[b]);
    sg.overlap(a, b) = sg.overlap(b, a) = shared;
  }
  FillAdjacency(sg);
  return sg;
}

std::vector<std::pair<int, int>> LshOverlapCandidates(
    std::span<const std::vector<NodeId>> sets, NodeId n, int bands, int bits,
    uint64_t seed) {
  const int T = static_cast<int>(sets.size());
  std::vector<std::pair<int, int>> pairs;
  std::vector<double> g(n);
  std::vector<uint64_t> signature(T);
  for (int band = 0; band < bands; ++band) {
    std::fill(signature.begin(), signature.end(), 0);
    for (int bit = 0; bit < bits; ++bit) {
      Rng rng = MakeRng(DeriveSeed(seed, static_cast<uint64_t>(band) * bits + bit));
      std::normal_distribution<double> normal;
      for (double& v : g) v = normal(rng);
      for (int a = 0; a < T; ++a) {
        double proj = 0.0;
        for (NodeId v : sets[a]) proj += g[v];
        signature[a] = (signature[a] << 1) | (proj >= 0.0 ? 1u : 0u);
      }
    }
    std::unordered_map<uint64_t, std::vector<int>> buckets;
    for (int a = 0; a < T; ++a) {
      if (!sets[a].empty()) buckets[signature[a]].push_back(a);
    }
    for (const auto& [sig, members] : buckets) {
      for (std::size_t i = 0; i < members.size(); ++i) {
        for (std::size_t j = i + 1; j < members.size(); ++j) {
          pairs.emplace_back(members[i], members[j]);
        }
      }
    }
  }
  std::sort(pairs.begin(), pairs.end());
  pairs.erase(std::unique(pairs.begin(), pairs.end()), pairs.end());
  return pairs;
}

Traversal SpanningTraversal(const SuperGraph& sg, int start) {
  const int T = sg.size();
  Traversal t;
  std::vector<char> visited(T, 0);
  std::vector<std::pair<int, std::size_t>> stack;
  visited[start] = 1;
  t.walk.push_back(start);
  stack.emplace_back(start, 0);
  while (!stack.empty()) {
    auto& [v, next] = stack.back();
    const auto& nbrs = sg.adjacency[v];
    while (next < nbrs.size() && visited[nbrs[next]]) ++next;
    if (next < nbrs.size()) {
      const int w = nbrs[next++];
      visited[w] = 1;
      t.walk.push_back(w);
      stack.emplace_back(w, 0);
    } else {
      stack.pop_back();
      if (!stack.empty()) t.walk.push_back(stack.back().first);
    }
  }
  for (int a = 0; a < T; ++a) {
    if (!visited[a]) t.uncovered.push_back(a);
  }
  return t;
}

AlignOutcome AlignStep(const MembershipMatrix& current,
                       const SoftMembership& reference,
                       double validation_threshold) {
  const int K = current.K();
  AlignOutcome out;
  out.perm.resize(K);
  std::iota(out.perm.begin(), out.perm.end(), 0);
  if (current.n() == 0) return out;
  const MembershipMatrix hard = RoundSoft(reference);
  Matrix confusion(K, K);
  for (int i = 0; i < current.n(); ++i) {
    if (current.assigned(i) && hard.assigned(i)) {
      confusion(current.label(i), hard.label(i)) += 1.0;
    }
  }
  out.perm = MatchPermutation(confusion);
  int agree = 0;
  for (int i = 0; i < current.n(); ++i) {
    if (current.assigned(i) && hard.assigned(i) &&
        out.perm[current.label(i)] == hard.label(i)) {
      ++agree;
    }
  }
  out.agreement = static_cast<double>(agree) / current.n();
  out.accepted = out.agreement >= validation_threshold;
  return out;
}

absl::Status GaleConfig::Validate() const {
  if (T < 1) return absl::InvalidArgumentError("T must be >= 1");
  if (absl::Status s = sampler.Validate(); !s.ok()) return s;
  if (!(theta > 0.0 && theta < 1.0)) {
    return absl::InvalidArgumentError("theta must lie in (0, 1)");
  }
  if (tau.has_value() && !(*tau > 0.0)) {
    return absl::InvalidArgumentError("tau must be > 0");
  }
  if (!(validation_threshold > 0.5 && validation_threshold <= 1.0)) {
    return absl::InvalidArgumentError("validation_threshold must lie in (0.5, 1]");
  }
  if (n_traversals < 1) {
    return absl::InvalidArgumentError("n_traversals must be >= 1");
  }
  if (m1.has_value() && *m1 < 1) return absl::InvalidArgumentError("m1 must be >= 1");
  if (!(walk_threshold >= 0.0)) {
    return absl::InvalidArgumentError("walk_threshold must be >= 0");
  }
  if (lsh_bands < 0) return absl::InvalidArgumentError("lsh_bands must be >= 0");
  if (lsh_bits < 1 || lsh_bits > 62) {
    return absl::InvalidArgumentError("lsh_bits must lie in [1, 62]");
  }
  return absl::OkStatus();
}

absl::StatusOr<GaleResult> StitchGale(NodeId n, int K, const GaleConfig& config,
                                      std::vector<LocalEstimate> locals,
                                      uint64_t seed) {
  if (absl::Status s = config.Validate(); !s.ok()) return s;
  const auto start_time = std::chrono::steady_clock::now();
  const int T = static_cast<int>(locals.size());
  GaleResult result;

  std::vector<int> used;
  double total_size = 0.0;
  std::vector<std::vector<NodeId>> sets(T);
  for (int l = 0; l < T; ++l) {
    if (!locals[l].used) continue;
    used.push_back(l);
    sets[l] = locals[l].drawn.sample.nodes;
    total_size += sets[l].size();
  }
  if (used.empty()) {
    return absl::FailedPreconditionError(absl::StrCat(
        "no admissible subgraph among ", T, " samples (m_star=",
        config.sampler.m_star, ", K=", K, ")"));
  }
  const double mean_size = total_size / used.size();
  result.m1 = config.m1.value_or(std::max(
      1, static_cast<int>(std::ceil(mean_size * mean_size / (2.0 * n) - 1e-9))));
  result.tau = config.tau.value_or(config.theta * total_size / n);

  SuperGraph sg;
  if (config.use_lsh) {
    const int bands = config.lsh_bands > 0
                          ? config.lsh_bands
                          : static_cast<int>(std::ceil(std::sqrt(static_cast<double>(T))));
    const auto candidates =
        LshOverlapCandidates(sets, n, bands, config.lsh_bits, DeriveSeed(seed, 0));
    sg = BuildSuperGraphFromCandidates(sets, result.m1, candidates);
  } else {
    sg = BuildSuperGraph(sets, n, result.m1);
  }
  result.supergraph_edges = sg.num_edges();
  if (used.size() > 1 && result.supergraph_edges == 0) {
    return absl::FailedPreconditionError(absl::StrCat(
        "super-graph has no edges: no two subgraphs share m1=", result.m1,
        " nodes"));
  }

  // First traversal starts at the largest subgraph, the others at random.
  std::vector<int> starts(config.n_traversals);
  starts[0] = used[0];
  for (int l : used) {
    if (sets[l].size() > sets[starts[0]].size()) starts[0] = l;
  }
  for (int t = 1; t < config.n_traversals; ++t) {
    Rng rng = MakeRng(DeriveSeed(seed, 1 + t));
    starts[t] = used[UniformIndex(rng, used.size())];
  }
  std::vector<WalkOutput> walks(config.n_traversals);
#pragma omp parallel for schedule(dynamic)
  for (int t = 0; t < config.n_traversals; ++t) {
    walks[t] = Walk(n, K, config, locals, sg, starts[t]);
  }

  Matrix votes = walks[0].votes;
  std::vector<double> count = walks[0].count;
  for (int t = 1; t < config.n_traversals; ++t) {
    AlignWalk(walks[0], walks[t], K);
    for (std::size_t k = 0; k < votes.data().size(); ++k) {
      votes.data()[k] += walks[t].votes.data()[k];
    }
    for (NodeId v = 0; v < n; ++v) count[v] += walks[t].count[v];
  }

  const double threshold = result.tau * config.n_traversals;
  result.soft = Matrix(n, K);
  for (NodeId v = 0; v < n; ++v) {
    if (count[v] > 0.0 && count[v] >= threshold) {
      for (int k = 0; k < K; ++k) result.soft(v, k) = votes(v, k) / count[v];
    }
  }
  const MembershipMatrix hard = RoundSoft(result.soft);
  std::vector<int> labels(n);
  for (NodeId v = 0; v < n; ++v) {
    if (hard.assigned(v)) {
      labels[v] = hard.label(v);
    } else {
      labels[v] = K;
      ++result.uncovered_nodes;
    }
  }
  absl::StatusOr<MembershipMatrix> z = MembershipMatrix::FromLabels(
      std::move(labels), result.uncovered_nodes > 0 ? K + 1 : K);
  if (!z.ok()) return z.status();
  result.membership = *std::move(z);
  result.votes = std::move(count);
  result.aligned = walks[0].perms;
  for (WalkOutput& w : walks) result.traversals.push_back(std::move(w.report));
  result.locals = std::move(locals);
  result.times.stitch = SecondsSince(start_time);
  return result;
}

absl::StatusOr<GaleResult> RunGale(const Graph& graph, int K,
                                   const GaleConfig& config,
                                   const BaseClusterer& base, uint64_t seed) {
  if (absl::Status s = config.Validate(); !s.ok()) return s;
  const NodeId n = graph.num_nodes();
  if (K < 1 || K > n) {
    return absl::InvalidArgumentError(
        absl::StrCat("GALE needs 1 <= K <= n; got K=", K, ", n=", n));
  }
  PhaseTimes times;
  absl::StatusOr<std::vector<LocalEstimate>> locals = DrawAndCluster(
      graph, K, config.sampler, config.T, base, DeriveSeed(seed, 0), times);
  if (!locals.ok()) return locals.status();
  absl::StatusOr<GaleResult> result =
      StitchGale(n, K, config, *std::move(locals), DeriveSeed(seed, 1));
  if (!result.ok()) return result.status();
  result->times.sampling = times.sampling;
  result->times.base = times.base;
  return result;
}

}  // namespace stitch
