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

#include "stitch/experiment.h"

#include <algorithm>
#include <bit>
#include <chrono>
#include <cmath>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

#include "absl/strings/str_cat.h"
#include "absl/strings/str_format.h"
#include "absl/strings/str_join.h"
#include "stitch/random.h"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace stitch {

using nlohmann::json;

namespace {

absl::Status FieldError(const std::string& path, const std::string& message) {
  return absl::InvalidArgumentError(absl::StrCat(path, ": ", message));
}

std::string Child(const std::string& path, const std::string& key) {
  return absl::StrCat(path, "/", key);
}

absl::Status CheckObject(const json& j, const std::string& path,
                         std::initializer_list<const char*> allowed) {
  if (!j.is_object()) return FieldError(path.empty() ? "/" : path, "expected an object");
  for (const auto& item : j.items()) {
    bool known = false;
    for (const char* key : allowed) known |= item.key() == key;
    if (!known) return FieldError(Child(path, item.key()), "unknown field");
  }
  return absl::OkStatus();
}

// Reads obj[key] into `out` when present; errors when missing and required.
template <typename T>
absl::Status Read(const json& obj, const std::string& path, const char* key,
                  T& out, bool required = false) {
  const std::string where = Child(path, key);
  if (!obj.contains(key)) {
    return required ? FieldError(where, "required field missing") : absl::OkStatus();
  }
  const json& v = obj.at(key);
  if constexpr (std::is_same_v<T, bool>) {
    if (!v.is_boolean()) return FieldError(where, "expected a boolean");
    out = v.get<bool>();
  } else if constexpr (std::is_integral_v<T>) {
    if (!v.is_number_integer()) return FieldError(where, "expected an integer");
    if (v.is_number_unsigned()) {
      const auto u = v.get<uint64_t>();
      if (u > static_cast<uint64_t>(std::numeric_limits<T>::max())) {
        return FieldError(where, "integer out of range");
      }
      out = static_cast<T>(u);
    } else {
      const auto s = v.get<int64_t>();
      if (s < static_cast<int64_t>(std::numeric_limits<T>::min()) ||
          (s > 0 && static_cast<uint64_t>(s) >
                        static_cast<uint64_t>(std::numeric_limits<T>::max()))) {
        return FieldError(where, "integer out of range");
      }
      out = static_cast<T>(s);
    }
  } else if constexpr (std::is_floating_point_v<T>) {
    if (!v.is_number()) return FieldError(where, "expected a number");
    out = v.get<double>();
  } else {
    if (!v.is_string()) return FieldError(where, "expected a string");
    out = v.get<std::string>();
  }
  return absl::OkStatus();
}

template <typename T>
absl::Status ReadOptional(const json& obj, const std::string& path,
                          const char* key, std::optional<T>& out) {
  if (!obj.contains(key)) return absl::OkStatus();
  T value{};
  if (absl::Status s = Read(obj, path, key, value); !s.ok()) return s;
  out = value;
  return absl::OkStatus();
}

// Exactly one key of `j`; its name is returned.
absl::StatusOr<std::string> OneOf(const json& j, const std::string& path,
                                  std::initializer_list<const char*> options) {
  if (!j.is_object() || j.size() != 1) {
    std::vector<std::string> names(options.begin(), options.end());
    return FieldError(path, absl::StrCat("expected an object with exactly one of: ",
                                         absl::StrJoin(names, ", ")));
  }
  const std::string key = j.begin().key();
  for (const char* option : options) {
    if (key == option) return key;
  }
  return FieldError(Child(path, key), "unknown variant");
}

// Re-labels a validation failure of a config struct with its location.
absl::Status AtPath(const absl::Status& s, const std::string& path) {
  if (s.ok()) return s;
  return FieldError(path, std::string(s.message()));
}

#define STITCH_RETURN_IF_ERROR(expr)            \
  do {                                          \
    if (absl::Status _s = (expr); !_s.ok()) {   \
      return _s;                                \
    }                                           \
  } while (0)

absl::StatusOr<SamplerSpec> ParseSampler(const json& j, const std::string& path) {
  STITCH_RETURN_IF_ERROR(
      CheckObject(j, path, {"scheme", "m", "h", "roots", "quantile", "m_star"}));
  SamplerSpec spec;
  std::string scheme = "random_m";
  STITCH_RETURN_IF_ERROR(Read(j, path, "scheme", scheme, true));
  absl::StatusOr<SamplerScheme> parsed = ParseSamplerScheme(scheme);
  if (!parsed.ok()) return AtPath(parsed.status(), Child(path, "scheme"));
  spec.scheme = *parsed;
  STITCH_RETURN_IF_ERROR(Read(j, path, "m", spec.m));
  STITCH_RETURN_IF_ERROR(Read(j, path, "h", spec.h));
  std::string roots = "uniform";
  STITCH_RETURN_IF_ERROR(Read(j, path, "roots", roots));
  absl::StatusOr<RootSelection> root_sel = ParseRootSelection(roots);
  if (!root_sel.ok()) return AtPath(root_sel.status(), Child(path, "roots"));
  spec.roots = *root_sel;
  STITCH_RETURN_IF_ERROR(Read(j, path, "quantile", spec.quantile));
  STITCH_RETURN_IF_ERROR(Read(j, path, "m_star", spec.m_star));
  STITCH_RETURN_IF_ERROR(AtPath(spec.Validate(), path));
  return spec;
}

absl::Status ParsePace(const json& j, const std::string& path, PaceConfig& cfg) {
  STITCH_RETURN_IF_ERROR(CheckObject(
      j, path, {"T", "sampler", "tau", "weights", "recovery", "eta"}));
  STITCH_RETURN_IF_ERROR(Read(j, path, "T", cfg.T, true));
  if (!j.contains("sampler")) return FieldError(Child(path, "sampler"), "required field missing");
  absl::StatusOr<SamplerSpec> sampler = ParseSampler(j["sampler"], Child(path, "sampler"));
  if (!sampler.ok()) return sampler.status();
  cfg.sampler = *sampler;
  if (j.contains("tau")) {
    const std::string tpath = Child(path, "tau");
    absl::StatusOr<std::string> mode = OneOf(j["tau"], tpath, {"theta", "absolute"});
    if (!mode.ok()) return mode.status();
    if (*mode == "theta") {
      cfg.tau_mode = TauMode::kFractionOfExpected;
      STITCH_RETURN_IF_ERROR(Read(j["tau"], tpath, "theta", cfg.theta));
    } else {
      cfg.tau_mode = TauMode::kAbsolute;
      STITCH_RETURN_IF_ERROR(Read(j["tau"], tpath, "absolute", cfg.tau));
    }
  }
  std::string weights = "uniform";
  STITCH_RETURN_IF_ERROR(Read(j, path, "weights", weights));
  absl::StatusOr<WeightScheme> scheme = ParseWeightScheme(weights);
  if (!scheme.ok()) return AtPath(scheme.status(), Child(path, "weights"));
  cfg.weights = *scheme;
  if (j.contains("recovery")) {
    const json& r = j["recovery"];
    const std::string rpath = Child(path, "recovery");
    STITCH_RETURN_IF_ERROR(CheckObject(
        r, rpath, {"method", "s", "kmeans_restarts", "eig_tol", "eig_max_iter"}));
    std::string method = "spectral_on_chat";
    STITCH_RETURN_IF_ERROR(Read(r, rpath, "method", method));
    absl::StatusOr<RecoveryMethod> m = ParseRecoveryMethod(method);
    if (!m.ok()) return AtPath(m.status(), Child(rpath, "method"));
    cfg.recovery.method = *m;
    STITCH_RETURN_IF_ERROR(Read(r, rpath, "s", cfg.recovery.s));
    STITCH_RETURN_IF_ERROR(Read(r, rpath, "kmeans_restarts", cfg.recovery.kmeans_restarts));
    STITCH_RETURN_IF_ERROR(Read(r, rpath, "eig_tol", cfg.recovery.eig_tol));
    STITCH_RETURN_IF_ERROR(Read(r, rpath, "eig_max_iter", cfg.recovery.eig_max_iter));
  }
  STITCH_RETURN_IF_ERROR(ReadOptional(j, path, "eta", cfg.eta));
  return AtPath(cfg.Validate(), path);
}

absl::Status ParseGale(const json& j, const std::string& path, GaleConfig& cfg) {
  STITCH_RETURN_IF_ERROR(CheckObject(
      j, path,
      {"T", "sampler", "theta", "tau", "validation_threshold", "n_traversals",
       "match_target", "m1", "walk_threshold", "lsh"}));
  STITCH_RETURN_IF_ERROR(Read(j, path, "T", cfg.T, true));
  if (!j.contains("sampler")) return FieldError(Child(path, "sampler"), "required field missing");
  absl::StatusOr<SamplerSpec> sampler = ParseSampler(j["sampler"], Child(path, "sampler"));
  if (!sampler.ok()) return sampler.status();
  cfg.sampler = *sampler;
  STITCH_RETURN_IF_ERROR(Read(j, path, "theta", cfg.theta));
  STITCH_RETURN_IF_ERROR(ReadOptional(j, path, "tau", cfg.tau));
  STITCH_RETURN_IF_ERROR(Read(j, path, "validation_threshold", cfg.validation_threshold));
  STITCH_RETURN_IF_ERROR(Read(j, path, "n_traversals", cfg.n_traversals));
  std::string target = "union";
  STITCH_RETURN_IF_ERROR(Read(j, path, "match_target", target));
  if (target == "union") {
    cfg.match_target = MatchTarget::kUnion;
  } else if (target == "previous") {
    cfg.match_target = MatchTarget::kPrevious;
  } else {
    return FieldError(Child(path, "match_target"), "expected union or previous");
  }
  STITCH_RETURN_IF_ERROR(ReadOptional(j, path, "m1", cfg.m1));
  STITCH_RETURN_IF_ERROR(Read(j, path, "walk_threshold", cfg.walk_threshold));
  if (j.contains("lsh")) {
    const std::string lpath = Child(path, "lsh");
    STITCH_RETURN_IF_ERROR(CheckObject(j["lsh"], lpath, {"bands", "bits"}));
    cfg.use_lsh = true;
    STITCH_RETURN_IF_ERROR(Read(j["lsh"], lpath, "bands", cfg.lsh_bands));
    STITCH_RETURN_IF_ERROR(Read(j["lsh"], lpath, "bits", cfg.lsh_bits));
  }
  return AtPath(cfg.Validate(), path);
}

absl::Status ParseBase(const json& j, const std::string& path,
                       BaseClustererSpec& spec) {
  STITCH_RETURN_IF_ERROR(CheckObject(
      j, path,
      {"name", "regularizer", "eig_tol", "eig_max_iter", "kmeans_restarts",
       "restarts", "max_sweeps", "tol"}));
  STITCH_RETURN_IF_ERROR(Read(j, path, "name", spec.name, true));
  if (j.contains("regularizer")) {
    const json& reg = j["regularizer"];
    if (reg.is_string() && reg.get<std::string>() == "auto") {
      spec.spectral.regularizer.reset();
    } else if (reg.is_number()) {
      spec.spectral.regularizer = reg.get<double>();
    } else {
      return FieldError(Child(path, "regularizer"), "expected a number or \"auto\"");
    }
  }
  STITCH_RETURN_IF_ERROR(Read(j, path, "eig_tol", spec.spectral.eig_tol));
  STITCH_RETURN_IF_ERROR(Read(j, path, "eig_max_iter", spec.spectral.eig_max_iter));
  STITCH_RETURN_IF_ERROR(Read(j, path, "kmeans_restarts", spec.spectral.kmeans_restarts));
  STITCH_RETURN_IF_ERROR(Read(j, path, "restarts", spec.mean_field.restarts));
  STITCH_RETURN_IF_ERROR(Read(j, path, "max_sweeps", spec.mean_field.max_sweeps));
  STITCH_RETURN_IF_ERROR(Read(j, path, "tol", spec.mean_field.tol));
  absl::StatusOr<std::unique_ptr<BaseClusterer>> probe = MakeBaseClusterer(spec);
  if (!probe.ok()) return AtPath(probe.status(), path);
  return absl::OkStatus();
}

std::string Resolve(const std::string& base_dir, const std::string& path) {
  if (base_dir.empty() || path.empty()) return path;
  std::filesystem::path p(path);
  if (p.is_absolute()) return path;
  return (std::filesystem::path(base_dir) / p).string();
}

double SecondsSince(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
      .count();
}

// A graph together with its optional ground truth.
struct Instance {
  Graph graph;
  int K = 0;
  std::optional<MembershipMatrix> truth;
};

absl::StatusOr<Instance> LoadEdgeListInstance(const EdgeListSource& src) {
  std::ifstream in(src.path);
  if (!in) return absl::NotFoundError(absl::StrCat("cannot open ", src.path));
  absl::StatusOr<EdgeListGraph> loaded = LoadEdgeList(in);
  if (!loaded.ok()) {
    return absl::InvalidArgumentError(
        absl::StrCat(src.path, ": ", loaded.status().message()));
  }
  Graph graph = std::move(loaded->graph);
  std::vector<int64_t> ids = std::move(loaded->original_ids);
  auto restrict_to = [&](const std::vector<NodeId>& keep) -> absl::Status {
    absl::StatusOr<SubgraphSample> sub = InducedSubgraph(graph, keep);
    if (!sub.ok()) return sub.status();
    std::vector<int64_t> kept_ids(keep.size());
    for (std::size_t a = 0; a < keep.size(); ++a) kept_ids[a] = ids[sub->nodes[a]];
    graph = std::move(sub->graph);
    ids = std::move(kept_ids);
    return absl::OkStatus();
  };
  if (src.largest_component) {
    STITCH_RETURN_IF_ERROR(restrict_to(LargestConnectedComponent(graph)));
  }
  if (src.drop_leaves) STITCH_RETURN_IF_ERROR(restrict_to(NonLeafNodes(graph)));

  Instance inst;
  inst.graph = std::move(graph);
  if (src.labels.has_value()) {
    std::ifstream lin(*src.labels);
    if (!lin) return absl::NotFoundError(absl::StrCat("cannot open ", *src.labels));
    absl::StatusOr<std::vector<int64_t>> labels = LoadLabels(lin);
    if (!labels.ok()) {
      return absl::InvalidArgumentError(
          absl::StrCat(*src.labels, ": ", labels.status().message()));
    }
    std::vector<int64_t> kept(ids.size());
    for (std::size_t v = 0; v < ids.size(); ++v) {
      if (ids[v] < 0 || static_cast<std::size_t>(ids[v]) >= labels->size()) {
        return absl::InvalidArgumentError(absl::StrCat(
            *src.labels, ": no label for node id ", ids[v]));
      }
      kept[v] = (*labels)[ids[v]];
    }
    inst.truth = CompactLabels(kept);
    inst.K = src.K.value_or(inst.truth->K());
  } else {
    inst.K = *src.K;
  }
  if (inst.K < 1 || inst.K > inst.graph.num_nodes()) {
    return absl::InvalidArgumentError(absl::StrCat(
        "K=", inst.K, " is not usable on a graph with ", inst.graph.num_nodes(),
        " nodes"));
  }
  return inst;
}

json LocalsJson(const std::vector<LocalEstimate>& locals) {
  json arr = json::array();
  for (std::size_t l = 0; l < locals.size(); ++l) {
    const LocalEstimate& est = locals[l];
    arr.push_back({{"index", l},
                   {"size", est.drawn.sample.size()},
                   {"admissible", est.drawn.admissible},
                   {"used", est.used},
                   {"root", est.drawn.root},
                   {"seconds", est.seconds}});
  }
  return arr;
}

std::string FormatDouble(double v) { return absl::StrFormat("%.12g", v); }

std::string FormatOptional(const std::optional<double>& v) {
  return v.has_value() ? FormatDouble(*v) : "";
}

}  // namespace

std::string MethodName(Method method) {
  switch (method) {
    case Method::kBaseOnly:
      return "base_only";
    case Method::kPace:
      return "pace";
    case Method::kGale:
      return "gale";
  }
  return "";
}

absl::StatusOr<ExperimentConfig> ParseExperimentConfig(const json& doc,
                                                       const std::string& base_dir) {
  STITCH_RETURN_IF_ERROR(CheckObject(
      doc, "",
      {"v", "source", "method", "base", "seeds", "workers", "output",
       "chat_output", "diagnostics_output"}));
  int version = 0;
  STITCH_RETURN_IF_ERROR(Read(doc, "", "v", version, true));
  if (version != 1) return FieldError("/v", "unsupported version; expected 1");

  ExperimentConfig cfg;
  if (!doc.contains("source")) return FieldError("/source", "required field missing");
  absl::StatusOr<std::string> source = OneOf(doc["source"], "/source", {"sbm", "edge_list"});
  if (!source.ok()) return source.status();
  if (*source == "sbm") {
    const json& j = doc["source"]["sbm"];
    const std::string path = "/source/sbm";
    STITCH_RETURN_IF_ERROR(CheckObject(j, path, {"n", "K", "pi", "rho_a", "r"}));
    SbmSource sbm;
    STITCH_RETURN_IF_ERROR(Read(j, path, "n", sbm.n, true));
    STITCH_RETURN_IF_ERROR(Read(j, path, "K", sbm.K, true));
    STITCH_RETURN_IF_ERROR(Read(j, path, "rho_a", sbm.rho_a, true));
    STITCH_RETURN_IF_ERROR(Read(j, path, "r", sbm.r, true));
    if (j.contains("pi")) {
      const json& pi = j["pi"];
      if (!pi.is_array()) return FieldError(Child(path, "pi"), "expected an array");
      for (std::size_t k = 0; k < pi.size(); ++k) {
        if (!pi[k].is_number()) {
          return FieldError(absl::StrCat(path, "/pi/", k), "expected a number");
        }
        sbm.pi.push_back(pi[k].get<double>());
      }
    }
    std::vector<double> pi = sbm.pi.empty() && sbm.K > 0
                                 ? std::vector<double>(sbm.K, 1.0 / sbm.K)
                                 : sbm.pi;
    absl::StatusOr<SbmParams> params =
        PlantedPartitionParams(sbm.rho_a, 1.0, sbm.r, sbm.K, pi);
    if (!params.ok()) return AtPath(params.status(), path);
    if (sbm.n < sbm.K) return FieldError(Child(path, "n"), "must be >= K");
    cfg.source = sbm;
  } else {
    const json& j = doc["source"]["edge_list"];
    const std::string path = "/source/edge_list";
    STITCH_RETURN_IF_ERROR(CheckObject(
        j, path, {"path", "labels", "K", "largest_component", "drop_leaves"}));
    EdgeListSource el;
    STITCH_RETURN_IF_ERROR(Read(j, path, "path", el.path, true));
    el.path = Resolve(base_dir, el.path);
    STITCH_RETURN_IF_ERROR(ReadOptional(j, path, "labels", el.labels));
    if (el.labels.has_value()) el.labels = Resolve(base_dir, *el.labels);
    STITCH_RETURN_IF_ERROR(ReadOptional(j, path, "K", el.K));
    if (!el.K.has_value() && !el.labels.has_value()) {
      return FieldError(Child(path, "K"), "required when no labels are given");
    }
    if (el.K.has_value() && *el.K < 1) return FieldError(Child(path, "K"), "must be >= 1");
    STITCH_RETURN_IF_ERROR(Read(j, path, "largest_component", el.largest_component));
    STITCH_RETURN_IF_ERROR(Read(j, path, "drop_leaves", el.drop_leaves));
    cfg.source = el;
  }

  if (!doc.contains("method")) return FieldError("/method", "required field missing");
  absl::StatusOr<std::string> method =
      OneOf(doc["method"], "/method", {"base_only", "pace", "gale"});
  if (!method.ok()) return method.status();
  if (*method == "base_only") {
    cfg.method = Method::kBaseOnly;
    STITCH_RETURN_IF_ERROR(CheckObject(doc["method"]["base_only"], "/method/base_only", {}));
  } else if (*method == "pace") {
    cfg.method = Method::kPace;
    STITCH_RETURN_IF_ERROR(ParsePace(doc["method"]["pace"], "/method/pace", cfg.pace));
  } else {
    cfg.method = Method::kGale;
    STITCH_RETURN_IF_ERROR(ParseGale(doc["method"]["gale"], "/method/gale", cfg.gale));
  }

  if (!doc.contains("base")) return FieldError("/base", "required field missing");
  STITCH_RETURN_IF_ERROR(ParseBase(doc["base"], "/base", cfg.base));

  if (!doc.contains("seeds")) return FieldError("/seeds", "required field missing");
  const json& seeds = doc["seeds"];
  if (!seeds.is_array() || seeds.empty()) {
    return FieldError("/seeds", "expected a non-empty array");
  }
  for (std::size_t i = 0; i < seeds.size(); ++i) {
    if (!seeds[i].is_number_integer() || seeds[i].get<int64_t>() < 0) {
      return FieldError(absl::StrCat("/seeds/", i), "expected a non-negative integer");
    }
    cfg.seeds.push_back(seeds[i].get<uint64_t>());
  }
  STITCH_RETURN_IF_ERROR(Read(doc, "", "workers", cfg.workers));
  if (cfg.workers < 0) return FieldError("/workers", "must be >= 0");
  STITCH_RETURN_IF_ERROR(Read(doc, "", "output", cfg.output));
  cfg.output = Resolve(base_dir, cfg.output);
  STITCH_RETURN_IF_ERROR(ReadOptional(doc, "", "chat_output", cfg.chat_output));
  if (cfg.chat_output.has_value()) cfg.chat_output = Resolve(base_dir, *cfg.chat_output);
  STITCH_RETURN_IF_ERROR(ReadOptional(doc, "", "diagnostics_output", cfg.diagnostics_output));
  if (cfg.diagnostics_output.has_value()) {
    cfg.diagnostics_output = Resolve(base_dir, *cfg.diagnostics_output);
  }
  return cfg;
}

absl::StatusOr<ExperimentConfig> LoadExperimentConfig(const std::string& path) {
  std::ifstream in(path);
  if (!in) return absl::InvalidArgumentError(absl::StrCat("cannot open ", path));
  json doc = json::parse(in, nullptr, /*allow_exceptions=*/false);
  if (doc.is_discarded()) {
    return absl::InvalidArgumentError(absl::StrCat(path, ": not valid JSON"));
  }
  const std::string dir = std::filesystem::path(path).parent_path().string();
  return ParseExperimentConfig(doc, dir);
}

MembershipMatrix CompactLabels(std::span<const int64_t> labels) {
  std::vector<int64_t> values(labels.begin(), labels.end());
  std::sort(values.begin(), values.end());
  values.erase(std::unique(values.begin(), values.end()), values.end());
  MembershipMatrix z(static_cast<int>(labels.size()), static_cast<int>(values.size()));
  for (std::size_t i = 0; i < labels.size(); ++i) {
    z.set_label(static_cast<int>(i),
                static_cast<int>(std::lower_bound(values.begin(), values.end(), labels[i]) -
                                 values.begin()));
  }
  return z;
}

absl::StatusOr<Metrics> Evaluate(const MembershipMatrix& estimate,
                                 const MembershipMatrix& truth,
                                 bool with_tilde_delta) {
  Metrics m;
  if (estimate.K() == truth.K() && estimate.all_assigned() && truth.all_assigned()) {
    absl::StatusOr<double> delta = MisclusteringFraction(estimate, truth);
    if (!delta.ok()) return delta.status();
    m.delta = *delta;
    m.misclustered_fraction = *delta / 2.0;
  }
  absl::StatusOr<double> ext = MisclusteringFractionExtended(estimate, truth);
  if (!ext.ok()) return ext.status();
  m.delta_extended = *ext;
  m.misclustered_fraction_extended = *ext / 2.0;
  if (with_tilde_delta) {
    absl::StatusOr<double> tilde = TildeDeltaOfMemberships(estimate, truth);
    if (!tilde.ok()) return tilde.status();
    m.tilde_delta = *tilde;
  }
  return m;
}

nlohmann::json PaceDiagnostics(const PaceResult& result) {
  return {{"method", "pace"},
          {"tau", result.tau},
          {"coverage", result.coverage},
          {"subgraphs", LocalsJson(result.locals)}};
}

nlohmann::json GaleDiagnostics(const GaleResult& result) {
  json traversals = json::array();
  for (const GaleTraversalReport& t : result.traversals) {
    json steps = json::array();
    for (const GaleStep& s : t.steps) {
      steps.push_back({{"subgraph", s.subgraph},
                       {"overlap", s.overlap},
                       {"agreement", s.agreement},
                       {"accepted", s.accepted}});
    }
    traversals.push_back({{"start", t.start},
                          {"length", t.walk.size()},
                          {"walk", t.walk},
                          {"steps", steps},
                          {"uncovered_subgraphs", t.uncovered_subgraphs}});
  }
  return {{"method", "gale"},
          {"tau", result.tau},
          {"m1", result.m1},
          {"supergraph_edges", result.supergraph_edges},
          {"uncovered_nodes", result.uncovered_nodes},
          {"traversals", traversals},
          {"subgraphs", LocalsJson(result.locals)}};
}

absl::StatusOr<RunReport> RunExperiment(const ExperimentConfig& config) {
#ifdef _OPENMP
  if (config.workers > 0) omp_set_num_threads(config.workers);
#endif
  absl::StatusOr<std::unique_ptr<BaseClusterer>> base = MakeBaseClusterer(config.base);
  if (!base.ok()) return base.status();

  std::optional<Instance> fixed;
  if (const auto* el = std::get_if<EdgeListSource>(&config.source)) {
    absl::StatusOr<Instance> inst = LoadEdgeListInstance(*el);
    if (!inst.ok()) return inst.status();
    fixed = *std::move(inst);
  }

  RunReport report;
  for (uint64_t seed : config.seeds) {
    const auto start = std::chrono::steady_clock::now();
    Instance generated;
    const Instance* inst = nullptr;
    if (fixed.has_value()) {
      inst = &*fixed;
    } else {
      const auto& sbm = std::get<SbmSource>(config.source);
      std::vector<double> pi =
          sbm.pi.empty() ? std::vector<double>(sbm.K, 1.0 / sbm.K) : sbm.pi;
      absl::StatusOr<SbmParams> params =
          PlantedPartitionParams(sbm.rho_a, 1.0, sbm.r, sbm.K, pi);
      if (!params.ok()) return params.status();
      absl::StatusOr<LabeledGraph> lg = GenerateSbm(*params, sbm.n, DeriveSeed(seed, 0));
      if (!lg.ok()) return lg.status();
      absl::StatusOr<MembershipMatrix> truth =
          MembershipMatrix::FromLabels(lg->labels, sbm.K);
      if (!truth.ok()) return truth.status();
      generated.graph = std::move(lg->graph);
      generated.K = sbm.K;
      generated.truth = *std::move(truth);
      inst = &generated;
    }
    const uint64_t run_seed = DeriveSeed(seed, 1);

    ReportRow row;
    row.seed = seed;
    row.method = MethodName(config.method);
    row.base = (*base)->name();
    row.n = inst->graph.num_nodes();
    row.K = inst->K;
    MembershipMatrix estimate;
    std::optional<MembershipMatrix> for_tilde;
    switch (config.method) {
      case Method::kBaseOnly: {
        const auto t0 = std::chrono::steady_clock::now();
        absl::StatusOr<MembershipMatrix> z =
            (*base)->Cluster(inst->graph, inst->K, run_seed);
        row.times.base = SecondsSince(t0);
        if (!z.ok()) return z.status();
        estimate = *std::move(z);
        report.diagnostics.push_back({{"method", "base_only"}});
        break;
      }
      case Method::kPace: {
        absl::StatusOr<PaceResult> r =
            RunPace(inst->graph, inst->K, config.pace, **base, run_seed);
        if (!r.ok()) return r.status();
        row.times = r->times;
        row.coverage = r->coverage;
        estimate = r->membership;
        report.diagnostics.push_back(PaceDiagnostics(*r));
        if (config.chat_output.has_value()) {
          std::string path = *config.chat_output;
          if (config.seeds.size() > 1) path = absl::StrCat(path, ".", seed);
          std::ofstream out(path, std::ios::binary);
          if (!out) return absl::UnavailableError(absl::StrCat("cannot write ", path));
          STITCH_RETURN_IF_ERROR(WriteChatBinary(r->chat, out));
        }
        break;
      }
      case Method::kGale: {
        absl::StatusOr<GaleResult> r =
            RunGale(inst->graph, inst->K, config.gale, **base, run_seed);
        if (!r.ok()) return r.status();
        row.times = r->times;
        row.uncovered = r->uncovered_nodes;
        row.coverage = 1.0 - static_cast<double>(r->uncovered_nodes) / row.n;
        estimate = r->membership;
        for_tilde = RoundSoft(r->soft);
        report.diagnostics.push_back(GaleDiagnostics(*r));
        break;
      }
    }
    if (inst->truth.has_value()) {
      absl::StatusOr<Metrics> m = Evaluate(estimate, *inst->truth, !for_tilde.has_value());
      if (!m.ok()) return m.status();
      if (for_tilde.has_value()) {
        absl::StatusOr<double> tilde = TildeDeltaOfMemberships(*for_tilde, *inst->truth);
        if (!tilde.ok()) return tilde.status();
        m->tilde_delta = *tilde;
      }
      row.metrics = *m;
    }
    row.t_total = SecondsSince(start);
    report.diagnostics.back()["seed"] = seed;
    report.rows.push_back(std::move(row));
  }
  return report;
}

std::string FormatReportCsv(const RunReport& report, bool include_times) {
  std::vector<std::string> header = {
      "seed", "method", "base", "n", "K", "delta", "misclustered_fraction",
      "delta_extended", "misclustered_fraction_extended", "tilde_delta",
      "coverage", "uncovered"};
  if (include_times) {
    for (const char* t : {"t_sampling", "t_base", "t_stitch", "t_recovery", "t_total"}) {
      header.push_back(t);
    }
  }
  std::string out = absl::StrCat(absl::StrJoin(header, ","), "\n");
  for (const ReportRow& row : report.rows) {
    std::vector<std::string> cells = {absl::StrCat(row.seed), row.method, row.base,
                                      absl::StrCat(row.n), absl::StrCat(row.K)};
    if (row.metrics.has_value()) {
      const Metrics& m = *row.metrics;
      cells.push_back(FormatOptional(m.delta));
      cells.push_back(FormatOptional(m.misclustered_fraction));
      cells.push_back(FormatDouble(m.delta_extended));
      cells.push_back(FormatDouble(m.misclustered_fraction_extended));
      cells.push_back(FormatOptional(m.tilde_delta));
    } else {
      cells.insert(cells.end(), 5, "");
    }
    cells.push_back(FormatDouble(row.coverage));
    cells.push_back(absl::StrCat(row.uncovered));
    if (include_times) {
      for (double t : {row.times.sampling, row.times.base, row.times.stitch,
                       row.times.recovery, row.t_total}) {
        cells.push_back(absl::StrFormat("%.6f", t));
      }
    }
    absl::StrAppend(&out, absl::StrJoin(cells, ","), "\n");
  }
  return out;
}

namespace {

template <typename T>
T ToLittleEndian(T v) {
  if constexpr (std::endian::native == std::endian::little) {
    return v;
  } else {
    unsigned char bytes[sizeof(T)];
    std::memcpy(bytes, &v, sizeof(T));
    std::reverse(bytes, bytes + sizeof(T));
    std::memcpy(&v, bytes, sizeof(T));
    return v;
  }
}

}  // namespace

absl::Status WriteChatBinary(const Matrix& chat, std::ostream& out) {
  if (chat.rows() != chat.cols()) {
    return absl::InvalidArgumentError("chat matrix must be square");
  }
  const uint64_t n = ToLittleEndian<uint64_t>(chat.rows());
  out.write(reinterpret_cast<const char*>(&n), sizeof(n));
  for (double v : chat.data()) {
    const double le = ToLittleEndian(v);
    out.write(reinterpret_cast<const char*>(&le), sizeof(le));
  }
  if (!out) return absl::DataLossError("write failed");
  return absl::OkStatus();
}

absl::StatusOr<Matrix> ReadChatBinary(std::istream& in) {
  uint64_t n = 0;
  if (!in.read(reinterpret_cast<char*>(&n), sizeof(n))) {
    return absl::DataLossError("missing header");
  }
  n = ToLittleEndian(n);
  if (n > (uint64_t{1} << 20)) {
    return absl::DataLossError(absl::StrCat("implausible dimension ", n));
  }
  Matrix chat(n, n);
  for (double& v : chat.data()) {
    double le = 0.0;
    if (!in.read(reinterpret_cast<char*>(&le), sizeof(le))) {
      return absl::DataLossError("truncated matrix data");
    }
    v = ToLittleEndian(le);
  }
  if (in.peek() != std::char_traits<char>::eof()) {
    return absl::DataLossError("trailing bytes after matrix data");
  }
  return chat;
}

}  // namespace stitch
