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

#include "stitch/local_estimates.h"

#include <chrono>
#include <optional>

#include "absl/strings/str_cat.h"
#include "stitch/random.h"

namespace stitch {

namespace {

double SecondsSince(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
      .count();
}

}  // namespace

absl::StatusOr<std::vector<LocalEstimate>> ClusterSamples(
    std::vector<DrawnSample> samples, int K, const BaseClusterer& base,
    uint64_t seed) {
  const auto T = static_cast<int64_t>(samples.size());
  std::vector<LocalEstimate> out(T);
  std::vector<std::optional<absl::Status>> errors(T);
#pragma omp parallel for schedule(dynamic)
  for (int64_t l = 0; l < T; ++l) {
    LocalEstimate& est = out[l];
    est.drawn = std::move(samples[l]);
    if (!est.drawn.admissible || est.drawn.sample.size() < K) continue;
    const auto start = std::chrono::steady_clock::now();
    absl::StatusOr<MembershipMatrix> z =
        base.ClusterSample(est.drawn.sample, K, DeriveSeed(seed, l));
    est.seconds = SecondsSince(start);
    if (!z.ok()) {
      errors[l] = z.status();
      continue;
    }
    if (z->n() != est.drawn.sample.size() || !z->all_assigned() ||
        z->K() != K) {
      errors[l] = absl::InternalError(
          absl::StrCat(base.name(), " returned an invalid membership"));
      continue;
    }
    est.labels = *std::move(z);
    est.used = true;
  }
  for (int64_t l = 0; l < T; ++l) {
    if (errors[l].has_value()) {
      const absl::Status& s = *errors[l];
      return absl::Status(s.code(), absl::StrCat("subgraph ", l, ": ", s.message()));
    }
  }
  return out;
}

absl::StatusOr<std::vector<LocalEstimate>> DrawAndCluster(
    const Graph& graph, int K, const SamplerSpec& sampler, int T,
    const BaseClusterer& base, uint64_t seed, PhaseTimes& times) {
  auto start = std::chrono::steady_clock::now();
  absl::StatusOr<std::vector<DrawnSample>> samples =
      DrawSubgraphs(graph, sampler, T, DeriveSeed(seed, 0));
  times.sampling += SecondsSince(start);
  if (!samples.ok()) return samples.status();
  start = std::chrono::steady_clock::now();
  absl::StatusOr<std::vector<LocalEstimate>> locals =
      ClusterSamples(*std::move(samples), K, base, DeriveSeed(seed, 1));
  times.base += SecondsSince(start);
  return locals;
}

int CountUsed(const std::vector<LocalEstimate>& locals) {
  int used = 0;
  for (const LocalEstimate& est : locals) used += est.used ? 1 : 0;
  return used;
}

}  // namespace stitch
