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

#ifndef STITCH_EXPERIMENT_H_
#define STITCH_EXPERIMENT_H_

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "json.hpp"
#include "stitch/base_clusterer.h"
#include "stitch/gale.h"
#include "stitch/graph.h"
#include "stitch/matrix.h"
#include "stitch/membership.h"
#include "stitch/pace.h"

namespace stitch {

struct SbmSource {
  NodeId n = 0;
  int K = 0;
  // Empty means balanced.
  std::vector<double> pi;
  // Within-block edge probability; between-block is rho_a * r.
  double rho_a = 0.0;
  double r = 0.0;
};

struct EdgeListSource {
  std::string path;
  // One integer label per line, line v for original node id v.
  std::optional<std::string> labels;
  // Required without labels; defaults to the number of distinct labels.
  std::optional<int> K;
  bool largest_component = true;
  bool drop_leaves = false;
};

enum class Method { kBaseOnly, kPace, kGale };

std::string MethodName(Method method);

struct ExperimentConfig {
  std::variant<SbmSource, EdgeListSource> source;
  Method method = Method::kBaseOnly;
  PaceConfig pace;
  GaleConfig gale;
  BaseClustererSpec base;
  std::vector<uint64_t> seeds;
  // 0 leaves the OpenMP default in place.
  int workers = 0;
  std::string output;
  // PACE only: binary dump of the averaged matrix.
  std::optional<std::string> chat_output;
  std::optional<std::string> diagnostics_output;
};

// Parses a version-1 configuration. Errors name the offending field by JSON
// pointer. Relative paths are resolved against `base_dir`.
absl::StatusOr<ExperimentConfig> ParseExperimentConfig(
    const nlohmann::json& doc, const std::string& base_dir = "");

absl::StatusOr<ExperimentConfig> LoadExperimentConfig(const std::string& path);

struct Metrics {
  // Absent when the estimate carries a spurious label.
  std::optional<double> delta;
  std::optional<double> misclustered_fraction;
  double delta_extended = 0.0;
  double misclustered_fraction_extended = 0.0;
  std::optional<double> tilde_delta;
};

// Misclustering metrics of `estimate` against `truth`. The misclustered-node
// fractions are exactly half the corresponding deltas.
absl::StatusOr<Metrics> Evaluate(const MembershipMatrix& estimate,
                                 const MembershipMatrix& truth,
                                 bool with_tilde_delta = true);

struct ReportRow {
  uint64_t seed = 0;
  std::string method;
  std::string base;
  NodeId n = 0;
  int K = 0;
  // Absent without ground truth.
  std::optional<Metrics> metrics;
  double coverage = 1.0;
  int uncovered = 0;
  PhaseTimes times;
  double t_total = 0.0;
};

struct RunReport {
  std::vector<ReportRow> rows;
  // One diagnostics object per seed.
  std::vector<nlohmann::json> diagnostics;
};

// Runs the configured method once per seed. Stitching failures come back as
// FailedPrecondition.
absl::StatusOr<RunReport> RunExperiment(const ExperimentConfig& config);

// CSV with a fixed column order; the timing columns are dropped when
// include_times is false.
std::string FormatReportCsv(const RunReport& report, bool include_times = true);

// Binary square matrix: n as a little-endian uint64, then n * n little-endian
// float64 values in row-major order.
absl::Status WriteChatBinary(const Matrix& chat, std::ostream& out);
absl::StatusOr<Matrix> ReadChatBinary(std::istream& in);

nlohmann::json PaceDiagnostics(const PaceResult& result);
nlohmann::json GaleDiagnostics(const GaleResult& result);

// Maps arbitrary integer labels to 0..k-1 in ascending order of value.
MembershipMatrix CompactLabels(std::span<const int64_t> labels);

}  // namespace stitch

#endif  // STITCH_EXPERIMENT_H_
