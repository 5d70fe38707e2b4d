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

// Command-line front end: run experiment configs, generate SBM graphs, and
// score labelings.

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "absl/status/status.h"
#include "absl/strings/str_cat.h"
#include "stitch/experiment.h"
#include "stitch/graph.h"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitFailure = 1;
constexpr int kExitConfig = 2;
constexpr int kExitStitch = 3;

int ExitCodeFor(const absl::Status& s) {
  switch (s.code()) {
    case absl::StatusCode::kOk:
      return kExitOk;
    case absl::StatusCode::kInvalidArgument:
    case absl::StatusCode::kNotFound:
      return kExitConfig;
    case absl::StatusCode::kFailedPrecondition:
      return kExitStitch;
    default:
      return kExitFailure;
  }
}

int Fail(const absl::Status& s) {
  std::cerr << "pace: " << s << "\n";
  return ExitCodeFor(s);
}

int DefaultWorkers() {
  const char* env = std::getenv("STITCH_WORKERS");
  if (env == nullptr) return 0;
  try {
    return std::max(0, std::stoi(env));
  } catch (const std::exception&) {
    std::cerr << "pace: ignoring STITCH_WORKERS=" << env << "\n";
    return 0;
  }
}

absl::Status WriteText(const std::string& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) return absl::UnavailableError(absl::StrCat("cannot write ", path));
  out << text;
  if (!out) return absl::DataLossError(absl::StrCat("write to ", path, " failed"));
  return absl::OkStatus();
}

int Run(const std::string& config_path, int workers, const std::string& out_path,
        const std::string& diagnostics_path) {
  absl::StatusOr<stitch::ExperimentConfig> config =
      stitch::LoadExperimentConfig(config_path);
  if (!config.ok()) return Fail(config.status());
  if (workers >= 0) {
    config->workers = workers;
  } else if (config->workers == 0) {
    config->workers = DefaultWorkers();
  }
  if (!out_path.empty()) config->output = out_path;
  if (!diagnostics_path.empty()) config->diagnostics_output = diagnostics_path;

  absl::StatusOr<stitch::RunReport> report = stitch::RunExperiment(*config);
  if (!report.ok()) return Fail(report.status());
  const std::string csv = stitch::FormatReportCsv(*report);
  if (config->output.empty()) {
    std::cout << csv;
  } else if (absl::Status s = WriteText(config->output, csv); !s.ok()) {
    return Fail(s);
  }
  if (config->diagnostics_output.has_value()) {
    nlohmann::json all = report->diagnostics;
    if (absl::Status s = WriteText(*config->diagnostics_output, all.dump(2) + "\n");
        !s.ok()) {
      return Fail(s);
    }
  }
  return kExitOk;
}

int GenSbm(int n, int K, double rho_a, double r, std::vector<double> pi,
           uint64_t seed, const std::string& edges_path,
           const std::string& labels_path) {
  if (pi.empty() && K > 0) pi.assign(K, 1.0 / K);
  absl::StatusOr<stitch::SbmParams> params =
      stitch::PlantedPartitionParams(rho_a, 1.0, r, K, pi);
  if (!params.ok()) return Fail(params.status());
  absl::StatusOr<stitch::LabeledGraph> lg = stitch::GenerateSbm(*params, n, seed);
  if (!lg.ok()) return Fail(lg.status());
  std::ofstream edges(edges_path);
  if (!edges) return Fail(absl::UnavailableError(absl::StrCat("cannot write ", edges_path)));
  stitch::WriteEdgeList(lg->graph, edges);
  if (!labels_path.empty()) {
    std::ofstream labels(labels_path);
    if (!labels) {
      return Fail(absl::UnavailableError(absl::StrCat("cannot write ", labels_path)));
    }
    stitch::WriteLabels(lg->labels, labels);
  }
  std::cerr << "n=" << n << " edges=" << lg->graph.num_edges() << " mean_degree="
            << 2.0 * static_cast<double>(lg->graph.num_edges()) / n
            << " expected_mean_degree=" << stitch::ExpectedMeanDegree(*params, n)
            << "\n";
  return kExitOk;
}

absl::StatusOr<stitch::MembershipMatrix> ReadLabelFile(const std::string& path) {
  std::ifstream in(path);
  if (!in) return absl::NotFoundError(absl::StrCat("cannot open ", path));
  absl::StatusOr<std::vector<int64_t>> labels = stitch::LoadLabels(in);
  if (!labels.ok()) {
    return absl::InvalidArgumentError(absl::StrCat(path, ": ", labels.status().message()));
  }
  return stitch::CompactLabels(*labels);
}

int Eval(const std::string& labels_path, const std::string& truth_path) {
  absl::StatusOr<stitch::MembershipMatrix> estimate = ReadLabelFile(labels_path);
  if (!estimate.ok()) return Fail(estimate.status());
  absl::StatusOr<stitch::MembershipMatrix> truth = ReadLabelFile(truth_path);
  if (!truth.ok()) return Fail(truth.status());
  if (estimate->n() != truth->n()) {
    return Fail(absl::InvalidArgumentError(absl::StrCat(
        "label files disagree on node count: ", estimate->n(), " vs ", truth->n())));
  }
  // A labeling with fewer clusters than the truth is padded with empty ones.
  stitch::MembershipMatrix padded = *estimate;
  if (padded.K() < truth->K()) {
    padded = *stitch::MembershipMatrix::FromLabels(
        std::vector<int>(estimate->labels().begin(), estimate->labels().end()),
        truth->K());
  }
  absl::StatusOr<stitch::Metrics> m = stitch::Evaluate(padded, *truth);
  if (!m.ok()) return Fail(m.status());
  auto show = [](const std::optional<double>& v) {
    return v.has_value() ? absl::StrCat(*v) : std::string("n/a");
  };
  std::cout << "n " << truth->n() << "\n"
            << "K_truth " << truth->K() << "\n"
            << "K_estimate " << estimate->K() << "\n"
            << "delta " << show(m->delta) << "\n"
            << "misclustered_fraction " << show(m->misclustered_fraction) << "\n"
            << "delta_extended " << m->delta_extended << "\n"
            << "misclustered_fraction_extended " << m->misclustered_fraction_extended
            << "\n"
            << "tilde_delta " << show(m->tilde_delta) << "\n";
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Subgraph-stitching community detection"};
  app.require_subcommand(1);

  std::string config_path, out_path, diagnostics_path;
  int workers = -1;
  CLI::App* run = app.add_subcommand("run", "Run an experiment config");
  run->add_option("config", config_path, "JSON config")->required();
  run->add_option("--workers", workers,
                  "Parallel workers (default: config, then $STITCH_WORKERS)")
      ->check(CLI::NonNegativeNumber);
  run->add_option("--out", out_path, "CSV report path (default: config output)");
  run->add_option("--diagnostics", diagnostics_path, "Diagnostics JSON path");

  int n = 0, K = 0;
  double rho_a = 0.0, r = 0.0;
  std::vector<double> pi;
  uint64_t seed = 0;
  std::string edges_path, labels_path;
  CLI::App* gen = app.add_subcommand("gen-sbm", "Sample a planted-partition SBM");
  gen->add_option("--n", n, "Node count")->required();
  gen->add_option("--K", K, "Cluster count")->required();
  gen->add_option("--rho-a", rho_a, "Within-cluster edge probability")->required();
  gen->add_option("--r", r, "Between/within probability ratio")->required();
  gen->add_option("--pi", pi, "Cluster proportions (default balanced)")->delimiter(',');
  gen->add_option("--seed", seed, "Random seed");
  gen->add_option("--edges", edges_path, "Edge list output")->required();
  gen->add_option("--labels", labels_path, "Label output");

  std::string est_path, truth_path;
  CLI::App* eval = app.add_subcommand("eval", "Compare a labeling to ground truth");
  eval->add_option("labels", est_path, "Estimated labels, one per line")->required();
  eval->add_option("truth", truth_path, "True labels, one per line")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfig;
  }

  if (*run) return Run(config_path, workers, out_path, diagnostics_path);
  if (*gen) return GenSbm(n, K, rho_a, r, pi, seed, edges_path, labels_path);
  return Eval(est_path, truth_path);
}
