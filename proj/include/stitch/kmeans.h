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

#ifndef STITCH_KMEANS_H_
#define STITCH_KMEANS_H_

#include <cstdint>
#include <vector>

#include "absl/status/statusor.h"
#include "stitch/matrix.h"

namespace stitch {

struct KMeansResult {
  std::vector<int> labels;
  Matrix centroids;
  // Sum of squared distances to the assigned centroids.
  double inertia = 0.0;
};

// Lloyd's algorithm from k-means++ seeds, run `restarts` times; the run with
// the smallest inertia wins (earliest on ties). Each run stops when no
// centroid moves by 1e-8 or after 300 iterations. A cluster that empties out
// is reseeded at the point farthest from its own centroid.
absl::StatusOr<KMeansResult> KMeans(const Matrix& points, int K, int restarts,
                                    uint64_t seed);

}  // namespace stitch

#endif  // STITCH_KMEANS_H_
