// Copyright 2026 The qpath Authors
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

#pragma once

// Decision-tree solution paths: enumeration, pruning, end-to-end evaluation,
// scoring and ranking.

#include "qpath/decompose.hpp"
#include "qpath/encode.hpp"
#include "qpath/instances.hpp"
#include "qpath/optimizers.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace qpath {

class PathError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class Decomposition { DirectCvrp, ClusterFirst };
enum class Algorithm { Qaoa, ClassicalExact, ClassicalHeuristic };
enum class OptionStatus { Implemented, PrunedStatic, Unimplemented };

std::string to_string(Decomposition d);
std::string to_string(Algorithm a);
std::string to_string(OptionStatus s);
Decomposition parse_decomposition(const std::string& s);
Algorithm parse_algorithm(const std::string& s);

namespace level {
inline constexpr const char* kDecomposition = "decomposition";
inline constexpr const char* kEncoding = "encoding";
inline constexpr const char* kPenalty = "penalty";
inline constexpr const char* kScaling = "scaling";
inline constexpr const char* kAlgorithm = "algorithm";
inline constexpr const char* kOptimizer = "optimizer";
}  // namespace level

struct CatalogOption {
  std::string level;
  std::string id;
  OptionStatus status = OptionStatus::Implemented;
  std::string rationale;
};

struct PathCatalog {
  std::vector<CatalogOption> options;

  static PathCatalog default_catalog();
  static const std::vector<std::string>& levels();

  std::vector<std::string> implemented(const std::string& level) const;
  std::vector<CatalogOption> not_implemented() const;

  /// Keeps only the listed implemented ids at `level`; other statuses stay.
  PathCatalog restricted(const std::string& level, const std::vector<std::string>& ids) const;

  /// Throws unless every level has an implemented option with a known id.
  void validate() const;
};

/// One branch through the tree. Penalty, scaling and optimizer are set iff
/// the algorithm is QAOA.
struct SolutionPath {
  Decomposition decomposition = Decomposition::ClusterFirst;
  Algorithm algorithm = Algorithm::Qaoa;
  std::optional<PenaltyStrategy> penalty;
  std::optional<ScalingStrategy> scaling;
  std::optional<Method> optimizer;

  std::string id() const;
  bool is_quantum() const { return algorithm == Algorithm::Qaoa; }
  void validate() const;
};

SolutionPath parse_path_id(const std::string& id);

struct Caps {
  int qubit_cap = 20;
  long eval_budget = 20000;
};

struct EnumeratedPath {
  SolutionPath path;
  int qubits = 0;
  bool pruned = false;
  std::string reason;
};

/// Knobs shared by every path of one evaluation run.
struct EvaluationSettings {
  double lambda = 1.2;
  double bbox_factor = 1.0;
  double calibration = 0.5;
  std::optional<int> depth_override;
  int shots = 4096;
  OptimizerConfig optimizer;  // method and budget are set per path

  EncodingConfig encoding_for(const SolutionPath& path, const Caps& caps) const;
};

/// direct-cvrp: n^2 for n customers; cluster-first: the largest cluster's
/// (m-1)^2 with m = cluster size + 1; classical paths need none.
int estimate_qubits(const SolutionPath& path, const CvrpInstance& inst);
int estimate_qubits(const SolutionPath& path, const CvrpInstance& inst, const Clustering& cl);

std::vector<EnumeratedPath> enumerate_paths(const PathCatalog& catalog, const CvrpInstance& inst, const Caps& caps);

struct TraceSummary {
  std::string method;
  int iterations = 0;
  long evaluations = 0;
  double initial_energy = 0.0;
  double best_energy = 0.0;
  std::string termination;
};

struct SubproblemRecord {
  std::vector<int> nodes;  // instance indices, depot first
  int qubits = 0;
  double penalty = 0.0;
  double scale = 1.0;
  int depth = 0;
  std::optional<TraceSummary> trace;
  double tour_length = 0.0;
  double exact_length = 0.0;
  double feasible_probability = 1.0;
  double optimal_probability = 1.0;
  bool decoded_from_samples = false;
};

enum class ReportStatus { Ok, Pruned, Failed };
std::string to_string(ReportStatus s);

struct PathReport {
  std::string path_id;
  ReportStatus status = ReportStatus::Ok;
  std::string reason;
  int qubits = 0;
  std::uint64_t seed = 0;
  std::vector<SubproblemRecord> subproblems;
  std::vector<Tour> tours;  // instance indices
  double total_length = 0.0;
  std::optional<double> reference_length;
  std::optional<double> approximation_ratio;
  double feasible_probability = 0.0;
  double optimal_probability = 0.0;
  long evaluations = 0;

  /// Optimizer traces per subproblem; not serialized into the report.
  std::vector<OptimizerTrace> traces;
  std::vector<std::vector<double>> final_params;
};

/// Per-path seed: master seed mixed with a stable hash of the path id.
std::uint64_t path_seed(std::uint64_t master, const std::string& path_id);

PathReport evaluate_path(const CvrpInstance& inst, const SolutionPath& path, std::uint64_t seed, const Caps& caps,
                         const EvaluationSettings& settings = {});

struct ScoreWeights {
  double quality = 0.6;
  double feasibility = 0.3;
  double cost = 0.1;
};

/// w_r / r + w_f * feasibility - w_c * log10(1 + evaluations) / 10 with the
/// positive weights renormalized to sum 1. -inf unless status is ok.
double score(const PathReport& report, const ScoreWeights& weights);

struct RankedPath {
  std::string path_id;
  std::optional<double> score;  // empty for pruned / failed paths
  ReportStatus status = ReportStatus::Ok;
  long evaluations = 0;
};

struct Recommendation {
  std::string instance;
  std::uint64_t seed = 0;
  ScoreWeights weights;
  Caps caps;
  std::vector<RankedPath> ranking;
  std::vector<PathReport> reports;  // enumeration order
  std::vector<CatalogOption> static_entries;
};

Recommendation recommend(const CvrpInstance& inst, const PathCatalog& catalog, const ScoreWeights& weights,
                         std::uint64_t seed, const Caps& caps, const EvaluationSettings& settings = {}, int jobs = 1);

/// Versioned JSON documents; see docs/formats.md.
std::string report_to_json(const PathReport& report);
std::string recommendation_to_json(const Recommendation& rec);
PathReport report_from_json(const std::string& text);
Recommendation recommendation_from_json(const std::string& text);

/// Fixed-width ranking table for humans.
std::string summary_table(const Recommendation& rec);

}  // namespace qpath
