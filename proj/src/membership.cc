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

#include "stitch/membership.h"

#include <algorithm>

#include "absl/strings/str_cat.h"
#include "stitch/assignment.h"

namespace stitch {

absl::StatusOr<MembershipMatrix> MembershipMatrix::FromLabels(
    std::vector<int> labels, int K) {
  if (K < 1) return absl::InvalidArgumentError("K must be positive");
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (labels[i] != kUnassigned && (labels[i] < 0 || labels[i] >= K)) {
      return absl::InvalidArgumentError(
          absl::StrCat("label ", labels[i], " of row ", i, " outside [0,", K,
                       ")"));
    }
  }
  MembershipMatrix z;
  z.K_ = K;
  z.labels_ = std::move(labels);
  return z;
}

bool MembershipMatrix::all_assigned() const {
  return std::none_of(labels_.begin(), labels_.end(),
                      [](int l) { return l == kUnassigned; });
}

bool IsPermutation(std::span<const int> perm) {
  std::vector<char> seen(perm.size(), 0);
  for (int p : perm) {
    if (p < 0 || p >= static_cast<int>(perm.size()) || seen[p]) return false;
    seen[p] = 1;
  }
  return true;
}

Permutation InversePermutation(std::span<const int> perm) {
  Permutation inv(perm.size());
  for (std::size_t k = 0; k < perm.size(); ++k) inv[perm[k]] = static_cast<int>(k);
  return inv;
}

absl::StatusOr<Matrix> Confusion(const MembershipMatrix& z1,
                                 const MembershipMatrix& z2) {
  if (z1.n() != z2.n()) {
    return absl::InvalidArgumentError(
        absl::StrCat("row count mismatch: ", z1.n(), " vs ", z2.n()));
  }
  Matrix m(z1.K(), z2.K());
  for (int i = 0; i < z1.n(); ++i) {
    if (z1.assigned(i) && z2.assigned(i)) m(z1.label(i), z2.label(i)) += 1.0;
  }
  return m;
}

Permutation MatchPermutation(const Matrix& confusion) {
  Matrix m = confusion;
  const int K = static_cast<int>(m.rows());
  Permutation perm(K, -1);
  std::vector<char> row_done(K, 0), col_done(K, 0);
  for (int round = 0; round < K; ++round) {
    int bi = -1, bj = -1;
    for (int i = 0; i < K; ++i) {
      if (row_done[i]) continue;
      for (int j = 0; j < K; ++j) {
        if (col_done[j]) continue;
        if (bi < 0 || m(i, j) > m(bi, bj)) {
          bi = i;
          bj = j;
        }
      }
    }
    perm[bi] = bj;
    // Striking out with -1 as well as the flags keeps the struck entries
    // below every live non-negative count.
    for (int t = 0; t < K; ++t) {
      m(bi, t) = -1.0;
      m(t, bj) = -1.0;
    }
    row_done[bi] = 1;
    col_done[bj] = 1;
  }
  return perm;
}

MembershipMatrix Align(const MembershipMatrix& z, std::span<const int> perm) {
  MembershipMatrix out(z.n(), z.K());
  for (int i = 0; i < z.n(); ++i) {
    if (z.assigned(i)) out.set_label(i, perm[z.label(i)]);
  }
  return out;
}

namespace {

// Largest total of confusion entries over bijections of the padded labels.
double BestMatchedMass(const Matrix& confusion) {
  const std::size_t d = std::max(confusion.rows(), confusion.cols());
  Matrix square(d, d);
  for (std::size_t a = 0; a < confusion.rows(); ++a) {
    for (std::size_t b = 0; b < confusion.cols(); ++b) {
      square(a, b) = confusion(a, b);
    }
  }
  std::vector<int> col = MaxWeightAssignment(square);
  double total = 0.0;
  for (std::size_t a = 0; a < d; ++a) total += square(a, col[a]);
  return total;
}

}  // namespace

absl::StatusOr<double> MisclusteringFraction(const MembershipMatrix& z1,
                                             const MembershipMatrix& z2) {
  if (z1.n() != z2.n() || z1.K() != z2.K()) {
    return absl::InvalidArgumentError(absl::StrCat(
        "dimension mismatch: ", z1.n(), "x", z1.K(), " vs ", z2.n(), "x",
        z2.K()));
  }
  if (!z1.all_assigned() || !z2.all_assigned()) {
    return absl::InvalidArgumentError("all rows must be assigned");
  }
  if (z1.n() == 0) return 0.0;
  absl::StatusOr<Matrix> m = Confusion(z1, z2);
  if (!m.ok()) return m.status();
  const double matched = BestMatchedMass(*m);
  return 2.0 * (z1.n() - matched) / z1.n();
}

absl::StatusOr<double> MisclusteringFractionExtended(
    const MembershipMatrix& estimate, const MembershipMatrix& truth) {
  if (estimate.n() != truth.n()) {
    return absl::InvalidArgumentError(absl::StrCat(
        "row count mismatch: ", estimate.n(), " vs ", truth.n()));
  }
  if (estimate.K() > truth.K() + 1) {
    return absl::InvalidArgumentError(absl::StrCat(
        "estimate has ", estimate.K(), " labels, at most K+1=", truth.K() + 1,
        " allowed"));
  }
  if (!truth.all_assigned()) {
    return absl::InvalidArgumentError("truth must assign every row");
  }
  const int n = estimate.n();
  if (n == 0) return 0.0;
  absl::StatusOr<Matrix> m = Confusion(estimate, truth);
  if (!m.ok()) return m.status();
  int assigned = 0;
  for (int i = 0; i < n; ++i) assigned += estimate.assigned(i) ? 1 : 0;
  const double matched = BestMatchedMass(*m);
  return (2.0 * (assigned - matched) + (n - assigned)) / n;
}

absl::StatusOr<Matrix> ClusteringMatrix(const MembershipMatrix& z) {
  if (!z.all_assigned()) {
    return absl::InvalidArgumentError(
        "clustering matrix needs every row assigned");
  }
  const int n = z.n();
  Matrix c(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) c(i, j) = z.label(i) == z.label(j) ? 1.0 : 0.0;
  }
  return c;
}

absl::StatusOr<double> TildeDelta(const Matrix& c1, const Matrix& c2) {
  if (c1.rows() != c2.rows() || c1.cols() != c2.cols()) {
    return absl::InvalidArgumentError("shape mismatch");
  }
  if (c1.rows() == 0) return 0.0;
  double sum = 0.0;
  auto a = c1.data();
  auto b = c2.data();
  for (std::size_t t = 0; t < a.size(); ++t) sum += (a[t] - b[t]) * (a[t] - b[t]);
  const double n = static_cast<double>(c1.rows());
  return sum / (n * n);
}

absl::StatusOr<double> TildeDeltaOfMemberships(const MembershipMatrix& z1,
                                               const MembershipMatrix& z2) {
  absl::StatusOr<Matrix> m = Confusion(z1, z2);
  if (!m.ok()) return m.status();
  if (z1.n() == 0) return 0.0;
  // ||C1 - C2||_F^2 = sum_a |a|^2 + sum_b |b|^2 - 2 sum_ab M_ab^2.
  std::vector<double> size1(z1.K(), 0.0), size2(z2.K(), 0.0);
  for (int i = 0; i < z1.n(); ++i) {
    if (z1.assigned(i)) size1[z1.label(i)] += 1.0;
    if (z2.assigned(i)) size2[z2.label(i)] += 1.0;
  }
  double total = 0.0;
  for (double s : size1) total += s * s;
  for (double s : size2) total += s * s;
  for (double v : m->data()) total -= 2.0 * v * v;
  const double n = z1.n();
  return total / (n * n);
}

MembershipMatrix RoundSoft(const SoftMembership& soft) {
  MembershipMatrix out(static_cast<int>(soft.rows()),
                       static_cast<int>(soft.cols()));
  for (std::size_t i = 0; i < soft.rows(); ++i) {
    auto row = soft.row(i);
    if (row.empty()) continue;
    std::size_t best = 0;
    for (std::size_t k = 1; k < row.size(); ++k) {
      if (row[k] > row[best]) best = k;
    }
    if (row[best] > 0.0) out.set_label(static_cast<int>(i), static_cast<int>(best));
  }
  return out;
}

SoftMembership ToSoft(const MembershipMatrix& z) {
  SoftMembership s(z.n(), z.K());
  for (int i = 0; i < z.n(); ++i) {
    if (z.assigned(i)) s(i, z.label(i)) = 1.0;
  }
  return s;
}

}  // namespace stitch
