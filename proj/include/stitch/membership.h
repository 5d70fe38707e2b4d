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

#ifndef STITCH_MEMBERSHIP_H_
#define STITCH_MEMBERSHIP_H_

#include <span>
#include <vector>

#include "absl/status/statusor.h"
#include "stitch/matrix.h"

namespace stitch {

inline constexpr int kUnassigned = -1;

// Hard cluster assignment: the label vector of a binary n x K matrix with at
// most one 1 per row. Unassigned rows stand for all-zero rows (nodes outside
// a subgraph, or nodes dropped by a coverage threshold).
class MembershipMatrix {
 public:
  MembershipMatrix() = default;
  // All rows unassigned.
  MembershipMatrix(int n, int K) : K_(K), labels_(n, kUnassigned) {}

  // Fails when a label is outside {0..K-1} and not kUnassigned.
  static absl::StatusOr<MembershipMatrix> FromLabels(std::vector<int> labels,
                                                     int K);

  int n() const { return static_cast<int>(labels_.size()); }
  int K() const { return K_; }
  int label(int i) const { return labels_[i]; }
  bool assigned(int i) const { return labels_[i] != kUnassigned; }
  bool all_assigned() const;
  std::span<const int> labels() const { return labels_; }

  void set_label(int i, int label) { labels_[i] = label; }

  friend bool operator==(const MembershipMatrix&,
                         const MembershipMatrix&) = default;

 private:
  int K_ = 0;
  std::vector<int> labels_;
};

// Fractional membership: an n x K matrix whose rows sum to one or are zero.
using SoftMembership = Matrix;

// Permutation of {0..K-1}: label k maps to perm[k].
using Permutation = std::vector<int>;

bool IsPermutation(std::span<const int> perm);
Permutation InversePermutation(std::span<const int> perm);

// M[a][b] = #{i : Z1(i) = a and Z2(i) = b}, skipping rows unassigned in
// either input. The result is Z1.K() x Z2.K().
absl::StatusOr<Matrix> Confusion(const MembershipMatrix& z1,
                                 const MembershipMatrix& z2);

// Greedy alignment of a square confusion matrix: repeatedly take the largest
// remaining entry (ties to the smallest row, then column), pair its row with
// its column, and strike both out. perm[row] = column.
Permutation MatchPermutation(const Matrix& confusion);

// Relabels k -> perm[k]; unassigned rows stay unassigned.
MembershipMatrix Align(const MembershipMatrix& z, std::span<const int> perm);

// delta(Z1, Z2) = min over label permutations Q of ||Z1 Q - Z2||_0 / n, the
// minimum taken exactly through a maximum-weight assignment. Equals twice the
// fraction of misclustered nodes.
absl::StatusOr<double> MisclusteringFraction(const MembershipMatrix& z1,
                                             const MembershipMatrix& z2);

// delta for an estimate that may carry one spurious label beyond the truth's
// K and may have unassigned rows. The label sets are padded with empty
// clusters to a common size and the best bijection is taken. A row in an
// unmatched label differs from the truth in two entries; an unassigned (zero)
// row differs in one.
absl::StatusOr<double> MisclusteringFractionExtended(
    const MembershipMatrix& estimate, const MembershipMatrix& truth);

// C = Z Z^T; requires every row assigned.
absl::StatusOr<Matrix> ClusteringMatrix(const MembershipMatrix& z);

// ||C1 - C2||_F^2 / n^2.
absl::StatusOr<double> TildeDelta(const Matrix& c1, const Matrix& c2);

// tilde_delta(Z1 Z1^T, Z2 Z2^T) from the confusion matrix, without forming
// the n x n matrices. Unassigned rows are zero rows.
absl::StatusOr<double> TildeDeltaOfMemberships(const MembershipMatrix& z1,
                                               const MembershipMatrix& z2);

// Row-wise argmax (ties to the smallest index); zero rows become unassigned.
MembershipMatrix RoundSoft(const SoftMembership& soft);

// One-hot rows of z; unassigned rows are zero.
SoftMembership ToSoft(const MembershipMatrix& z);

}  // namespace stitch

#endif  // STITCH_MEMBERSHIP_H_
