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

#include "qpath/pathfinder.hpp"

#include "qpath/ansatz.hpp"
#include "qpath/qsim.hpp"

#include <json.hpp>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <iomanip>
#include <limits>
#include <sstream>
#include <stdexcept>
#include <thread>

namespace qpath {

namespace {

using nlohmann::json;

constexpr int kReportVersion = 1;

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t fnv1a(const std::string& s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

bool within(double value, double reference) { return value <= reference + 1e-9 * std::max(1.0, std::abs(reference)); }

struct SubproblemOutcome {
  SubproblemRecord record;
  Tour tour;
  OptimizerTrace trace;
  std::vector<double> params;
  bool timed_out = false;
};

SubproblemOutcome solve_classically(const TspInstance& tsp, Algorithm algorithm) {
  SubproblemOutcome out;
  const double exact = solve_tsp_exact(tsp).length;
  const TourResult res = algorithm == Algorithm::ClassicalExact ? solve_tsp_exact(tsp) : solve_tsp_heuristic(tsp);
  out.tour = res.tour;
  out.record.tour_length = res.length;
  out.record.exact_length = exact;
  out.record.feasible_probability = 1.0;
  out.record.optimal_probability = within(res.length, exact) ? 1.0 : 0.0;
  return out;
}

SubproblemOutcome solve_with_qaoa(const TspInstance& tsp, const SolutionPath& path, std::uint64_t seed,
                                  const Caps& caps, const EvaluationSettings& settings) {
  SubproblemOutcome out;
  auto& rec = out.record;
  const EncodingConfig enc = settings.encoding_for(path, caps);
  const int m = tsp.size();
  const double exact = solve_tsp_exact(tsp).length;
  rec.exact_length = exact;
  rec.qubits = (m - 1) * (m - 1);

  rec.penalty = select_penalty(tsp, enc);
  const IsingModel raw = qubo_to_ising(tsp_to_qubo(tsp, rec.penalty));
  const IsingModel ising = scale_ising(raw, enc);
  rec.scale = ising.scale;
  rec.depth = recommend_depth(interaction_graph(ising), settings.depth_override);
  const int p = std::max(rec.depth, 1);
  rec.depth = p;

  const EnergyTable table = energy_table<double>(ising, enc.qubit_cap);
  Objective obj(2 * p, [&](const Eigen::VectorXd& theta) {
    return expectation<double>(qaoa_state<double>(table, p, theta), table);
  });
  OptimizerConfig ocfg = settings.optimizer;
  ocfg.method = *path.optimizer;
  ocfg.max_evals = caps.eval_budget;
  ocfg.seed = splitmix64(seed);
  out.trace = minimize(obj, init_params(p, InitStrategy::LinearRamp, seed), ocfg);
  out.timed_out = out.trace.reason == Termination::Timeout;
  out.params.assign(out.trace.best_params.data(), out.trace.best_params.data() + out.trace.best_params.size());
  rec.trace = TraceSummary{to_string(ocfg.method),
                           static_cast<int>(out.trace.size()) - 1,
                           out.trace.total_evals,
                           out.trace.energies.front(),
                           out.trace.best_energy,
                           to_string(out.trace.reason)};

  const StateVector state = qaoa_state<double>(table, p, out.trace.best_params);
  std::vector<std::optional<Tour>> decoded(static_cast<std::size_t>(state.size()));
  double feasible = 0.0, optimal = 0.0;
  for (Eigen::Index z = 0; z < state.size(); ++z) {
    decoded[z] = decode_index(static_cast<BasisIndex>(z), m, tsp.start);
    if (!decoded[z]) continue;
    const double prob = std::norm(state(z));
    feasible += prob;
    if (within(closed_length(tsp.distances, decoded[z]->order), exact)) optimal += prob;
  }
  rec.feasible_probability = std::clamp(feasible, 0.0, 1.0);
  rec.optimal_probability = std::clamp(optimal, 0.0, 1.0);

  // Best feasible sample; otherwise the most probable feasible basis state.
  const Counts counts = sample<double>(state, settings.shots, splitmix64(seed ^ 0x5a4d504cULL));
  std::optional<BasisIndex> pick;
  double pick_len = std::numeric_limits<double>::infinity();
  for (const auto& [z, n] : counts) {
    if (!decoded[z]) continue;
    const double len = closed_length(tsp.distances, decoded[z]->order);
    if (len < pick_len) {
      pick_len = len;
      pick = z;
    }
  }
  rec.decoded_from_samples = pick.has_value();
  if (!pick) {
    double best_prob = -1.0;
    for (Eigen::Index z = 0; z < state.size(); ++z) {
      if (!decoded[z]) continue;
      const double prob = std::norm(state(z));
      if (prob > best_prob) {
        best_prob = prob;
        pick = static_cast<BasisIndex>(z);
      }
    }
  }
  if (!pick) throw PathError("no feasible basis state exists");
  out.tour = *decoded[*pick];
  rec.tour_length = closed_length(tsp.distances, out.tour.order);
  return out;
}

json trace_summary_json(const TraceSummary& t) {
  return {{"method", t.method},           {"iterations", t.iterations}, {"evaluations", t.evaluations},
          {"initial_energy", t.initial_energy}, {"best_energy", t.best_energy}, {"termination", t.termination}};
}

json report_json(const PathReport& r) {
  json doc;
  doc["path_id"] = r.path_id;
  doc["status"] = to_string(r.status);
  doc["reason"] = r.reason;
  doc["qubits"] = r.qubits;
  doc["seed"] = r.seed;
  json subs = json::array();
  for (const auto& s : r.subproblems) {
    json j{{"nodes", s.nodes},
           {"qubits", s.qubits},
           {"penalty", s.penalty},
           {"scale", s.scale},
           {"depth", s.depth},
           {"tour_length", s.tour_length},
           {"exact_length", s.exact_length},
           {"feasible_probability", s.feasible_probability},
           {"optimal_probability", s.optimal_probability},
           {"decoded_from_samples", s.decoded_from_samples}};
    j["trace"] = s.trace ? trace_summary_json(*s.trace) : json(nullptr);
    subs.push_back(std::move(j));
  }
  doc["subproblems"] = std::move(subs);
  json tours = json::array();
  for (const auto& t : r.tours) tours.push_back(t.order);
  doc["tours"] = std::move(tours);
  doc["total_length"] = r.total_length;
  doc["reference_length"] = r.reference_length ? json(*r.reference_length) : json(nullptr);
  doc["approximation_ratio"] = r.approximation_ratio ? json(*r.approximation_ratio) : json(nullptr);
  doc["feasible_probability"] = r.feasible_probability;
  doc["optimal_probability"] = r.optimal_probability;
  doc["evaluations"] = r.evaluations;
  doc["final_params"] = r.final_params;
  return doc;
}

ReportStatus parse_status(const std::string& s) {
  for (ReportStatus st : {ReportStatus::Ok, ReportStatus::Pruned, ReportStatus::Failed})
    if (to_string(st) == s) return st;
  throw PathError("unknown report status '" + s + "'");
}

PathReport report_from(const json& doc) {
  PathReport r;
  r.path_id = doc.at("path_id").get<std::string>();
  r.status = parse_status(doc.at("status").get<std::string>());
  r.reason = doc.value("reason", std::string{});
  r.qubits = doc.value("qubits", 0);
  r.seed = doc.value("seed", std::uint64_t{0});
  for (const auto& j : doc.at("subproblems")) {
    SubproblemRecord s;
    s.nodes = j.at("nodes").get<std::vector<int>>();
    s.qubits = j.at("qubits").get<int>();
    s.penalty = j.at("penalty").get<double>();
    s.scale = j.at("scale").get<double>();
    s.depth = j.at("depth").get<int>();
    s.tour_length = j.at("tour_length").get<double>();
    s.exact_length = j.at("exact_length").get<double>();
    s.feasible_probability = j.at("feasible_probability").get<double>();
    s.optimal_probability = j.at("optimal_probability").get<double>();
    s.decoded_from_samples = j.at("decoded_from_samples").get<bool>();
    if (const auto& t = j.at("trace"); !t.is_null())
      s.trace = TraceSummary{t.at("method").get<std::string>(),      t.at("iterations").get<int>(),
                             t.at("evaluations").get<long>(),        t.at("initial_energy").get<double>(),
                             t.at("best_energy").get<double>(),      t.at("termination").get<std::string>()};
    r.subproblems.push_back(std::move(s));
  }
  for (const auto& t : doc.at("tours")) r.tours.push_back(Tour{t.get<std::vector<int>>()});
  r.total_length = doc.at("total_length").get<double>();
  if (!doc.at("reference_length").is_null()) r.reference_length = doc.at("reference_length").get<double>();
  if (!doc.at("approximation_ratio").is_null()) r.approximation_ratio = doc.at("approximation_ratio").get<double>();
  r.feasible_probability = doc.at("feasible_probability").get<double>();
  r.optimal_probability = doc.at("optimal_probability").get<double>();
  r.evaluations = doc.at("evaluations").get<long>();
  r.final_params = doc.value("final_params", std::vector<std::vector<double>>{});
  return r;
}

}  // namespace

std::string to_string(Decomposition d) { return d == Decomposition::DirectCvrp ? "direct-cvrp" : "cluster-first"; }

std::string to_string(Algorithm a) {
  switch (a) {
    case Algorithm::Qaoa: return "qaoa";
    case Algorithm::ClassicalExact: return "classical-exact";
    case Algorithm::ClassicalHeuristic: return "classical-heuristic";
  }
  return "";
}

std::string to_string(OptionStatus s) {
  switch (s) {
    case OptionStatus::Implemented: return "implemented";
    case OptionStatus::PrunedStatic: return "pruned-static";
    case OptionStatus::Unimplemented: return "unimplemented";
  }
  return "";
}

std::string to_string(ReportStatus s) {
  switch (s) {
    case ReportStatus::Ok: return "ok";
    case ReportStatus::Pruned: return "pruned";
    case ReportStatus::Failed: return "failed";
  }
  return "";
}

Decomposition parse_decomposition(const std::string& s) {
  if (s == "direct-cvrp") return Decomposition::DirectCvrp;
  if (s == "cluster-first") return Decomposition::ClusterFirst;
  throw PathError("unknown decomposition '" + s + "'");
}

Algorithm parse_algorithm(const std::string& s) {
  for (Algorithm a : {Algorithm::Qaoa, Algorithm::ClassicalExact, Algorithm::ClassicalHeuristic})
    if (to_string(a) == s) return a;
  throw PathError("unknown algorithm '" + s + "'");
}

const std::vector<std::string>& PathCatalog::levels() {
  static const std::vector<std::string> all{level::kDecomposition, level::kEncoding, level::kPenalty,
                                            level::kScaling,       level::kAlgorithm, level::kOptimizer};
  return all;
}

PathCatalog PathCatalog::default_catalog() {
  using S = OptionStatus;
  PathCatalog c;
  c.options = {
      {level::kDecomposition, "direct-cvrp", S::Implemented,
       "three-index route/node/time encoding; qubit estimate only, never executed"},
      {level::kDecomposition, "cluster-first", S::Implemented, ""},
      {level::kEncoding, "one-hot", S::Implemented, ""},
      {level::kEncoding, "binary", S::Unimplemented, "log-size integer encoding not yet integrated"},
      {level::kEncoding, "domain-wall", S::Unimplemented, "domain-wall integer encoding not yet integrated"},
      {level::kEncoding, "hobo", S::Unimplemented, "higher-order terms need a non-quadratic cost layer"},
      {level::kEncoding, "unbalanced-penalization", S::Unimplemented,
       "inequality-constraint penalties; TSP one-hot constraints are equalities"},
      {level::kPenalty, "exact-min-search", S::Implemented, ""},
      {level::kPenalty, "bounding-box", S::Implemented, ""},
      {level::kScaling, "exact-width", S::Implemented, ""},
      {level::kScaling, "gershgorin-bound", S::Implemented, ""},
      {level::kScaling, "none", S::Implemented, ""},
      {level::kAlgorithm, "qaoa", S::Implemented, ""},
      {level::kAlgorithm, "classical-exact", S::Implemented, ""},
      {level::kAlgorithm, "classical-heuristic", S::Implemented, ""},
      {level::kAlgorithm, "warm-start-qaoa", S::PrunedStatic,
       "feasible one-hot states sit at least four bit flips apart, so a classical warm start biases the "
       "circuit toward one feasible basin that is generally not the optimum's"},
      {level::kAlgorithm, "recursive-qaoa", S::PrunedStatic,
       "still needs the full problem on qubits (no size reduction up front) and its variable elimination "
       "depends on QAOA correlations that are weak at the depths simulated here"},
      {level::kOptimizer, "adam", S::Implemented, ""},
      {level::kOptimizer, "nelder-mead", S::Implemented, ""},
      {level::kOptimizer, "umda", S::Implemented, ""},
      {level::kOptimizer, "quasi-newton", S::Implemented, "BFGS stand-in for SLSQP on the unconstrained angle space"},
  };
  return c;
}

std::vector<std::string> PathCatalog::implemented(const std::string& lvl) const {
  std::vector<std::string> out;
  for (const auto& o : options)
    if (o.level == lvl && o.status == OptionStatus::Implemented) out.push_back(o.id);
  return out;
}

std::vector<CatalogOption> PathCatalog::not_implemented() const {
  std::vector<CatalogOption> out;
  for (const auto& o : options)
    if (o.status != OptionStatus::Implemented) out.push_back(o);
  return out;
}

PathCatalog PathCatalog::restricted(const std::string& lvl, const std::vector<std::string>& ids) const {
  PathCatalog out;
  for (const auto& o : options) {
    if (o.level == lvl && o.status == OptionStatus::Implemented &&
        std::find(ids.begin(), ids.end(), o.id) == ids.end())
      continue;
    out.options.push_back(o);
  }
  for (const auto& id : ids) {
    const bool known = std::any_of(out.options.begin(), out.options.end(), [&](const CatalogOption& o) {
      return o.level == lvl && o.id == id && o.status == OptionStatus::Implemented;
    });
    if (!known) throw PathError("no implemented " + lvl + " option '" + id + "'");
  }
  return out;
}

void PathCatalog::validate() const {
  for (const auto& lvl : levels())
    if (implemented(lvl).empty()) throw PathError("catalog level '" + lvl + "' has no implemented option");
  for (const auto& o : options) {
    if (o.status != OptionStatus::Implemented) continue;
    if (o.level == level::kDecomposition) parse_decomposition(o.id);
    else if (o.level == level::kPenalty) parse_penalty_strategy(o.id);
    else if (o.level == level::kScaling) parse_scaling_strategy(o.id);
    else if (o.level == level::kAlgorithm) parse_algorithm(o.id);
    else if (o.level == level::kOptimizer) parse_method(o.id);
    else if (o.level == level::kEncoding) {
      if (o.id != "one-hot") throw PathError("encoding '" + o.id + "' has no implementation");
    } else {
      throw PathError("unknown catalog level '" + o.level + "'");
    }
  }
}

std::string SolutionPath::id() const {
  std::string s = to_string(decomposition) + "/";
  if (!is_quantum()) return s + to_string(algorithm);
  return s + to_string(*penalty) + "/" + to_string(*scaling) + "/qaoa/" + to_string(*optimizer);
}

void SolutionPath::validate() const {
  const bool q = is_quantum();
  if (q != optimizer.has_value() || q != penalty.has_value() || q != scaling.has_value())
    throw PathError("optimizer, penalty and scaling must be set exactly for QAOA paths");
}

SolutionPath parse_path_id(const std::string& id) {
  std::vector<std::string> parts;
  std::stringstream ss(id);
  for (std::string item; std::getline(ss, item, '/');) parts.push_back(item);
  SolutionPath p;
  if (parts.size() == 2) {
    p.decomposition = parse_decomposition(parts[0]);
    p.algorithm = parse_algorithm(parts[1]);
    if (p.is_quantum()) throw PathError("QAOA path id needs penalty, scaling and optimizer");
  } else if (parts.size() == 5 && parts[3] == "qaoa") {
    p.decomposition = parse_decomposition(parts[0]);
    p.algorithm = Algorithm::Qaoa;
    p.penalty = parse_penalty_strategy(parts[1]);
    p.scaling = parse_scaling_strategy(parts[2]);
    p.optimizer = parse_method(parts[4]);
  } else {
    throw PathError("malformed path id '" + id + "'");
  }
  return p;
}

EncodingConfig EvaluationSettings::encoding_for(const SolutionPath& path, const Caps& caps) const {
  EncodingConfig cfg;
  cfg.lambda = lambda;
  cfg.bbox_factor = bbox_factor;
  cfg.calibration = calibration;
  cfg.qubit_cap = std::clamp(caps.qubit_cap, 0, 24);
  if (path.penalty) cfg.penalty_strategy = *path.penalty;
  if (path.scaling) cfg.scaling_strategy = *path.scaling;
  cfg.validate();
  return cfg;
}

int estimate_qubits(const SolutionPath& path, const CvrpInstance& inst, const Clustering& cl) {
  if (!path.is_quantum()) return 0;
  if (path.decomposition == Decomposition::DirectCvrp) {
    const int n = inst.customer_count();
    return n * n;
  }
  int worst = 0;
  for (const auto& c : cl.clusters) {
    const int k = static_cast<int>(c.size());
    worst = std::max(worst, k * k);
  }
  return worst;
}

int estimate_qubits(const SolutionPath& path, const CvrpInstance& inst) {
  return estimate_qubits(path, inst, cluster_capacitated(inst));
}

std::vector<EnumeratedPath> enumerate_paths(const PathCatalog& catalog, const CvrpInstance& inst, const Caps& caps) {
  catalog.validate();
  const Clustering cl = cluster_capacitated(inst);
  std::vector<EnumeratedPath> out;
  auto push = [&](SolutionPath p) {
    EnumeratedPath e;
    e.qubits = estimate_qubits(p, inst, cl);
    if (p.is_quantum() && e.qubits > caps.qubit_cap) {
      e.pruned = true;
      e.reason = "estimated " + std::to_string(e.qubits) + " qubits exceeds cap " + std::to_string(caps.qubit_cap);
    }
    e.path = std::move(p);
    out.push_back(std::move(e));
  };
  for (const auto& d : catalog.implemented(level::kDecomposition)) {
    const Decomposition dec = parse_decomposition(d);
    for (const auto& a : catalog.implemented(level::kAlgorithm)) {
      const Algorithm alg = parse_algorithm(a);
      if (alg != Algorithm::Qaoa) {
        // Classical baselines solve the per-cluster TSPs.
        if (dec != Decomposition::ClusterFirst) continue;
        push(SolutionPath{dec, alg, std::nullopt, std::nullopt, std::nullopt});
        continue;
      }
      for (const auto& pen : catalog.implemented(level::kPenalty))
        for (const auto& sc : catalog.implemented(level::kScaling))
          for (const auto& opt : catalog.implemented(level::kOptimizer))
            push(SolutionPath{dec, alg, parse_penalty_strategy(pen), parse_scaling_strategy(sc), parse_method(opt)});
    }
  }
  return out;
}

std::uint64_t path_seed(std::uint64_t master, const std::string& path_id) {
  return splitmix64(master ^ fnv1a(path_id));
}

PathReport evaluate_path(const CvrpInstance& inst, const SolutionPath& path, std::uint64_t seed, const Caps& caps,
                         const EvaluationSettings& settings) {
  path.validate();
  PathReport report;
  report.path_id = path.id();
  report.seed = seed;
  const Clustering cl = cluster_capacitated(inst);
  report.qubits = estimate_qubits(path, inst, cl);
  auto fail = [&](std::string why) {
    report.status = ReportStatus::Failed;
    report.reason = std::move(why);
    return report;
  };
  if (path.is_quantum() && report.qubits > caps.qubit_cap) {
    report.status = ReportStatus::Pruned;
    report.reason = "estimated " + std::to_string(report.qubits) + " qubits exceeds cap " +
                    std::to_string(caps.qubit_cap);
    return report;
  }
  if (path.decomposition == Decomposition::DirectCvrp)
    return fail("direct CVRP encoding is used for qubit estimation only and cannot be executed");

  try {
    const auto tsps = subproblems(inst, cl);
    std::vector<std::pair<TspInstance, Tour>> tours;
    double reference = 0.0;
    bool timed_out = false;
    report.feasible_probability = 1.0;
    report.optimal_probability = 1.0;
    for (std::size_t c = 0; c < tsps.size(); ++c) {
      const std::uint64_t sub_seed = splitmix64(seed + c);
      SubproblemOutcome o;
      try {
        o = path.is_quantum() ? solve_with_qaoa(tsps[c], path, sub_seed, caps, settings)
                              : solve_classically(tsps[c], path.algorithm);
      } catch (const std::exception& e) {
        throw std::runtime_error("cluster " + std::to_string(c) + " (" + std::to_string(tsps[c].size()) +
                                 " nodes): " + e.what());
      }
      o.record.nodes = tsps[c].origin_labels;
      reference += o.record.exact_length;
      report.feasible_probability *= o.record.feasible_probability;
      report.optimal_probability *= o.record.optimal_probability;
      if (o.record.trace) report.evaluations += o.record.trace->evaluations;
      timed_out = timed_out || o.timed_out;
      if (path.is_quantum()) {
        report.traces.push_back(std::move(o.trace));
        report.final_params.push_back(std::move(o.params));
      }
      tours.emplace_back(tsps[c], std::move(o.tour));
      report.subproblems.push_back(std::move(o.record));
    }
    const CvrpSolution sol = assemble(inst, tours);
    report.tours = sol.tours;
    report.total_length = sol.total_length;
    report.reference_length = reference;
    report.approximation_ratio = reference > 0.0 ? sol.total_length / reference : 1.0;
    if (timed_out) {
      report.status = ReportStatus::Failed;
      report.reason = "timeout: evaluation budget of " + std::to_string(caps.eval_budget) + " exhausted";
    }
  } catch (const std::exception& e) {
    return fail(e.what());
  }
  return report;
}

double score(const PathReport& report, const ScoreWeights& weights) {
  if (report.status != ReportStatus::Ok) return -std::numeric_limits<double>::infinity();
  const bool use_quality = weights.quality > 0.0 && report.approximation_ratio.has_value();
  const double wq = use_quality ? weights.quality : 0.0;
  const double wf = std::max(weights.feasibility, 0.0);
  const double wc = std::max(weights.cost, 0.0);
  const double total = wq + wf + wc;
  if (!(total > 0.0)) return 0.0;
  double s = 0.0;
  if (use_quality) s += wq / total / *report.approximation_ratio;
  s += wf / total * report.feasible_probability;
  s -= wc / total * std::log10(1.0 + static_cast<double>(report.evaluations)) / 10.0;
  return s;
}

Recommendation recommend(const CvrpInstance& inst, const PathCatalog& catalog, const ScoreWeights& weights,
                         std::uint64_t seed, const Caps& caps, const EvaluationSettings& settings, int jobs) {
  const auto paths = enumerate_paths(catalog, inst, caps);
  Recommendation rec;
  rec.instance = inst.name;
  rec.seed = seed;
  rec.weights = weights;
  rec.caps = caps;
  rec.static_entries = catalog.not_implemented();
  rec.reports.resize(paths.size());

  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < paths.size(); i = next++) {
      const auto& e = paths[i];
      const std::string id = e.path.id();
      if (e.pruned) {
        PathReport r;
        r.path_id = id;
        r.status = ReportStatus::Pruned;
        r.reason = e.reason;
        r.qubits = e.qubits;
        rec.reports[i] = std::move(r);
      } else {
        rec.reports[i] = evaluate_path(inst, e.path, path_seed(seed, id), caps, settings);
      }
    }
  };
  const int threads = std::max(1, std::min<int>(jobs, static_cast<int>(paths.size())));
  std::vector<std::thread> pool;
  for (int t = 1; t < threads; ++t) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();

  for (const auto& r : rec.reports) {
    RankedPath rp{r.path_id, std::nullopt, r.status, r.evaluations};
    if (r.status == ReportStatus::Ok) rp.score = score(r, weights);
    rec.ranking.push_back(std::move(rp));
  }
  std::sort(rec.ranking.begin(), rec.ranking.end(), [](const RankedPath& a, const RankedPath& b) {
    if (a.score.has_value() != b.score.has_value()) return a.score.has_value();
    if (a.score && *a.score != *b.score) return *a.score > *b.score;
    if (a.evaluations != b.evaluations) return a.evaluations < b.evaluations;
    return a.path_id < b.path_id;
  });
  return rec;
}

std::string report_to_json(const PathReport& report) {
  json doc = report_json(report);
  doc["schema"] = "qpath.path-report";
  doc["version"] = kReportVersion;
  return doc.dump(2);
}

PathReport report_from_json(const std::string& text) {
  try {
    return report_from(json::parse(text));
  } catch (const json::exception& e) {
    throw PathError(std::string("malformed path report: ") + e.what());
  }
}

std::string recommendation_to_json(const Recommendation& rec) {
  json doc;
  doc["schema"] = "qpath.recommendation";
  doc["version"] = kReportVersion;
  doc["instance"] = rec.instance;
  doc["seed"] = rec.seed;
  doc["weights"] = {{"quality", rec.weights.quality},
                    {"feasibility", rec.weights.feasibility},
                    {"cost", rec.weights.cost}};
  doc["caps"] = {{"qubit_cap", rec.caps.qubit_cap}, {"eval_budget", rec.caps.eval_budget}};
  json ranking = json::array();
  for (const auto& r : rec.ranking)
    ranking.push_back({{"path_id", r.path_id},
                       {"score", r.score ? json(*r.score) : json(nullptr)},
                       {"status", to_string(r.status)},
                       {"evaluations", r.evaluations}});
  doc["ranking"] = std::move(ranking);
  json reports = json::array();
  for (const auto& r : rec.reports) reports.push_back(report_json(r));
  doc["reports"] = std::move(reports);
  json statics = json::array();
  for (const auto& o : rec.static_entries)
    statics.push_back({{"level", o.level}, {"id", o.id}, {"status", to_string(o.status)}, {"rationale", o.rationale}});
  doc["catalog_static"] = std::move(statics);
  return doc.dump(2);
}

Recommendation recommendation_from_json(const std::string& text) {
  try {
    const json doc = json::parse(text);
    if (doc.at("schema").get<std::string>() != "qpath.recommendation")
      throw PathError("not a recommendation document");
    Recommendation rec;
    rec.instance = doc.at("instance").get<std::string>();
    rec.seed = doc.at("seed").get<std::uint64_t>();
    const auto& w = doc.at("weights");
    rec.weights = {w.at("quality").get<double>(), w.at("feasibility").get<double>(), w.at("cost").get<double>()};
    rec.caps = {doc.at("caps").at("qubit_cap").get<int>(), doc.at("caps").at("eval_budget").get<long>()};
    for (const auto& r : doc.at("ranking")) {
      RankedPath rp{r.at("path_id").get<std::string>(), std::nullopt, parse_status(r.at("status").get<std::string>()),
                    r.at("evaluations").get<long>()};
      if (!r.at("score").is_null()) rp.score = r.at("score").get<double>();
      rec.ranking.push_back(std::move(rp));
    }
    for (const auto& r : doc.at("reports")) rec.reports.push_back(report_from(r));
    for (const auto& o : doc.at("catalog_static")) {
      const std::string st = o.at("status").get<std::string>();
      rec.static_entries.push_back({o.at("level").get<std::string>(), o.at("id").get<std::string>(),
                                    st == "pruned-static" ? OptionStatus::PrunedStatic : OptionStatus::Unimplemented,
                                    o.at("rationale").get<std::string>()});
    }
    return rec;
  } catch (const json::exception& e) {
    throw PathError(std::string("malformed recommendation: ") + e.what());
  }
}

std::string summary_table(const Recommendation& rec) {
  std::ostringstream os;
  os << "instance " << rec.instance << "  seed " << rec.seed << "  qubit_cap " << rec.caps.qubit_cap
     << "  eval_budget " << rec.caps.eval_budget << '\n';
  std::size_t width = 4;
  for (const auto& rp : rec.ranking) width = std::max(width, rp.path_id.size());
  const int id_col = static_cast<int>(width) + 2;
  os << std::left << std::setw(6) << "rank" << std::setw(id_col) << "path" << std::setw(10) << "status" << std::right
     << std::setw(10) << "score" << std::setw(9) << "r" << std::setw(9) << "p_feas" << std::setw(10) << "evals"
     << "  note\n";
  auto find = [&](const std::string& id) -> const PathReport* {
    for (const auto& r : rec.reports)
      if (r.path_id == id) return &r;
    return nullptr;
  };
  int rank = 0;
  for (const auto& rp : rec.ranking) {
    const PathReport* r = find(rp.path_id);
    os << std::left << std::setw(6) << ++rank << std::setw(id_col) << rp.path_id << std::setw(10) << to_string(rp.status)
       << std::right << std::fixed << std::setprecision(4);
    if (rp.score) os << std::setw(10) << *rp.score;
    else os << std::setw(10) << "-";
    if (r && r->approximation_ratio && rp.status == ReportStatus::Ok) os << std::setw(9) << *r->approximation_ratio;
    else os << std::setw(9) << "-";
    if (r && rp.status == ReportStatus::Ok) os << std::setw(9) << r->feasible_probability;
    else os << std::setw(9) << "-";
    os << std::setw(10) << rp.evaluations << "  " << (r ? r->reason : "") << '\n';
    os.unsetf(std::ios::fixed);
  }
  for (const auto& o : rec.static_entries)
    os << "[" << to_string(o.status) << "] " << o.level << "/" << o.id << ": " << o.rationale << '\n';
  return os.str();
}

}  // namespace qpath
