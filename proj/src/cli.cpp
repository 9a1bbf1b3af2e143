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

#include "qpath/cli.hpp"

#include "qpath/ansatz.hpp"
#include "qpath/decompose.hpp"
#include "qpath/encode.hpp"
#include "qpath/instances.hpp"
#include "qpath/monitor.hpp"
#include "qpath/pathfinder.hpp"
#include "qpath/qsim.hpp"

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <sstream>
#include <thread>

namespace qpath {

namespace {

namespace fs = std::filesystem;

class CliError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct CommonOptions {
  std::string instance;
  std::string out_dir;
  std::uint64_t seed = 0;
  int qubit_cap = 20;
  long budget = 20000;
  double lambda = 1.2;
  double bbox_factor = 1.0;
  double calibration = 0.5;
  int depth = -1;
  int shots = 4096;
  bool force = false;
};

struct PathOptions {
  std::string decomposition = "cluster-first";
  std::string penalty = "exact-min-search";
  std::string scaling = "exact-width";
  std::string algorithm = "qaoa";
  std::string optimizer = "quasi-newton";
};

void add_common(CLI::App* cmd, CommonOptions& o) {
  cmd->add_option("--instance", o.instance, "instance file (native JSON or EUC_2D text)")->required();
  cmd->add_option("--out-dir", o.out_dir, "output directory, created if absent")->required();
  cmd->add_option("--seed", o.seed, "master seed");
  cmd->add_option("--qubit-cap", o.qubit_cap, "largest simulable qubit count")->check(CLI::Range(0, 24));
  cmd->add_option("--budget", o.budget, "objective evaluations per optimizer run")->check(CLI::PositiveNumber);
  cmd->add_option("--lambda", o.lambda, "penalty multiplier over P_min");
  cmd->add_option("--bbox-factor", o.bbox_factor, "multiplier for the bounding-box penalty");
  cmd->add_option("--calibration", o.calibration, "factor applied to the Gershgorin width bound");
  cmd->add_option("--depth", o.depth, "override the recommended QAOA depth");
  cmd->add_option("--shots", o.shots, "samples drawn at the final parameters")->check(CLI::PositiveNumber);
  cmd->add_flag("--force", o.force, "overwrite existing output files");
}

void add_path(CLI::App* cmd, PathOptions& o) {
  cmd->add_option("--decomposition", o.decomposition)->check(CLI::IsMember({"direct-cvrp", "cluster-first"}));
  cmd->add_option("--penalty", o.penalty)->check(CLI::IsMember({"exact-min-search", "bounding-box"}));
  cmd->add_option("--scaling", o.scaling)->check(CLI::IsMember({"exact-width", "gershgorin-bound", "none"}));
  cmd->add_option("--algorithm", o.algorithm)
      ->check(CLI::IsMember({"qaoa", "classical-exact", "classical-heuristic"}));
  cmd->add_option("--optimizer", o.optimizer)
      ->check(CLI::IsMember({"adam", "nelder-mead", "umda", "quasi-newton"}));
}

EvaluationSettings settings_from(const CommonOptions& o) {
  EvaluationSettings s;
  s.lambda = o.lambda;
  s.bbox_factor = o.bbox_factor;
  s.calibration = o.calibration;
  s.shots = o.shots;
  if (o.depth >= 0) s.depth_override = o.depth;
  EncodingConfig probe;
  probe.lambda = o.lambda;
  probe.bbox_factor = o.bbox_factor;
  probe.calibration = o.calibration;
  probe.qubit_cap = o.qubit_cap;
  probe.validate();
  return s;
}

SolutionPath path_from(const PathOptions& o) {
  SolutionPath p;
  p.decomposition = parse_decomposition(o.decomposition);
  p.algorithm = parse_algorithm(o.algorithm);
  if (p.is_quantum()) {
    p.penalty = parse_penalty_strategy(o.penalty);
    p.scaling = parse_scaling_strategy(o.scaling);
    p.optimizer = parse_method(o.optimizer);
  }
  return p;
}

fs::path prepare(const std::string& dir, const std::vector<std::string>& files, bool force) {
  const fs::path root(dir);
  fs::create_directories(root);
  if (!force)
    for (const auto& f : files)
      if (fs::exists(root / f)) throw CliError("refusing to overwrite " + (root / f).string() + " (use --force)");
  return root;
}

void write_text(const fs::path& dest, const std::string& body) {
  std::ofstream out(dest, std::ios::binary | std::ios::trunc);
  if (!out) throw CliError("cannot write " + dest.string());
  out << body;
  if (!out) throw CliError("write failed for " + dest.string());
}

std::vector<double> parse_list(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  for (std::string item; std::getline(ss, item, ',');) {
    try {
      out.push_back(std::stod(item));
    } catch (...) {
      throw CliError("not a number: '" + item + "'");
    }
  }
  return out;
}

std::vector<std::string> split(const std::string& text) {
  std::vector<std::string> out;
  std::stringstream ss(text);
  for (std::string item; std::getline(ss, item, ',');)
    if (!item.empty()) out.push_back(item);
  return out;
}

int cmd_generate(const GeneratorSpec& spec, const std::string& name, const std::string& out_path, bool force,
                 std::ostream& out) {
  if (!force && fs::exists(out_path)) throw CliError("refusing to overwrite " + out_path + " (use --force)");
  CvrpInstance inst = generate_random(spec);
  if (!name.empty()) inst.name = name;
  std::ostringstream body;
  write_instance(body, inst);
  const fs::path dest(out_path);
  if (dest.has_parent_path()) fs::create_directories(dest.parent_path());
  write_text(dest, body.str());
  out << "wrote " << out_path << " (" << inst.customer_count() << " customers, capacity " << inst.capacity << ")\n";
  return 0;
}

int cmd_solve(const CommonOptions& co, const PathOptions& po, bool landscape, int scan_k, double scan_extent,
              std::ostream& out) {
  const CvrpInstance inst = load_instance_file(co.instance);
  const SolutionPath path = path_from(po);
  const EvaluationSettings settings = settings_from(co);
  const Caps caps{co.qubit_cap, co.budget};
  const Clustering cl = cluster_capacitated(inst);
  const int qubits = estimate_qubits(path, inst, cl);
  if (path.is_quantum() && qubits > caps.qubit_cap)
    throw CliError("path " + path.id() + " is pruned: estimated " + std::to_string(qubits) +
                   " qubits exceeds cap " + std::to_string(caps.qubit_cap));

  std::vector<std::string> files{"report.json", "clustering.json"};
  if (path.is_quantum()) {
    for (std::size_t c = 0; c < cl.size(); ++c) {
      files.push_back("trace_" + std::to_string(c) + ".csv");
      files.push_back("projection_" + std::to_string(c) + ".csv");
      if (landscape) files.push_back("landscape_" + std::to_string(c) + ".csv");
    }
  }
  const fs::path root = prepare(co.out_dir, files, co.force);

  const PathReport report = evaluate_path(inst, path, path_seed(co.seed, path.id()), caps, settings);
  if (report.status != ReportStatus::Ok) {
    write_text(root / "report.json", report_to_json(report) + "\n");
    throw CliError("path " + path.id() + " " + to_string(report.status) + ": " + report.reason);
  }
  write_text(root / "report.json", report_to_json(report) + "\n");
  write_text(root / "clustering.json", clustering_to_json(cl) + "\n");

  for (std::size_t c = 0; c < report.traces.size(); ++c) {
    const auto& trace = report.traces[c];
    export_trace(trace, root / ("trace_" + std::to_string(c) + ".csv"), true);
    if (trace.size() >= 2)
      export_projection(project_trajectory(trace), root / ("projection_" + std::to_string(c) + ".csv"), true);
    if (landscape) {
      const auto& rec = report.subproblems[c];
      const TspInstance tsp = make_tsp(inst, rec.nodes);
      const EncodingConfig enc = settings.encoding_for(path, caps);
      const IsingModel ising = scale_ising(qubo_to_ising(tsp_to_qubo(tsp, rec.penalty)), enc);
      const EnergyTable table = energy_table<double>(ising, enc.qubit_cap);
      const int p = rec.depth;
      Objective obj(2 * p, [&](const Eigen::VectorXd& theta) {
        return expectation<double>(qaoa_state<double>(table, p, theta), table);
      });
      const Eigen::VectorXd center = trace.best_params;
      export_landscape(landscape_scan(obj, center, scan_extent, scan_k),
                       root / ("landscape_" + std::to_string(c) + ".csv"), true);
    }
  }
  out << path.id() << ": length " << report.total_length;
  if (report.approximation_ratio) out << ", r = " << *report.approximation_ratio;
  out << ", feasible probability " << report.feasible_probability << ", evaluations " << report.evaluations
      << '\n';
  return 0;
}

int cmd_recommend(const CommonOptions& co, const std::string& weights_text, int jobs,
                  const std::map<std::string, std::string>& restrictions, std::ostream& out) {
  const CvrpInstance inst = load_instance_file(co.instance);
  const EvaluationSettings settings = settings_from(co);
  const auto w = parse_list(weights_text);
  if (w.size() != 3) throw CliError("--weights expects three comma-separated values");
  if (w[0] < 0 || w[1] < 0 || w[2] < 0) throw CliError("--weights must be nonnegative");
  PathCatalog catalog = PathCatalog::default_catalog();
  for (const auto& [lvl, ids] : restrictions)
    if (!ids.empty()) catalog = catalog.restricted(lvl, split(ids));
  const fs::path root = prepare(co.out_dir, {"recommendation.json", "summary.txt"}, co.force);
  const Recommendation rec = recommend(inst, catalog, ScoreWeights{w[0], w[1], w[2]}, co.seed,
                                       Caps{co.qubit_cap, co.budget}, settings, jobs);
  write_text(root / "recommendation.json", recommendation_to_json(rec) + "\n");
  const std::string table = summary_table(rec);
  write_text(root / "summary.txt", table);
  out << table;
  return 0;
}

int cmd_landscape(const CommonOptions& co, const PathOptions& po, int cluster, const std::string& params_text,
                  const std::string& u_text, const std::string& v_text, int k, double extent, std::ostream& out) {
  const CvrpInstance inst = load_instance_file(co.instance);
  SolutionPath path = path_from(po);
  if (!path.is_quantum()) throw CliError("landscape scans need a QAOA path");
  const EvaluationSettings settings = settings_from(co);
  const Caps caps{co.qubit_cap, co.budget};
  const Clustering cl = cluster_capacitated(inst);
  if (cluster < 0 || cluster >= static_cast<int>(cl.size()))
    throw CliError("cluster index " + std::to_string(cluster) + " out of range (" + std::to_string(cl.size()) +
                   " clusters)");
  const auto tsps = subproblems(inst, cl);
  const TspInstance& tsp = tsps[cluster];
  const int qubits = (tsp.size() - 1) * (tsp.size() - 1);
  if (qubits > caps.qubit_cap)
    throw CliError("cluster " + std::to_string(cluster) + " needs " + std::to_string(qubits) +
                   " qubits, cap is " + std::to_string(caps.qubit_cap));
  const fs::path root = prepare(co.out_dir, {"landscape.csv"}, co.force);

  const EncodingConfig enc = settings.encoding_for(path, caps);
  const IsingModel ising = scale_ising(qubo_to_ising(tsp_to_qubo(tsp, select_penalty(tsp, enc))), enc);
  const int p = recommend_depth(interaction_graph(ising), settings.depth_override);
  if (p < 1) throw CliError("landscape needs depth >= 1");
  const EnergyTable table = energy_table<double>(ising, enc.qubit_cap);
  Objective obj(2 * p, [&](const Eigen::VectorXd& theta) {
    return expectation<double>(qaoa_state<double>(table, p, theta), table);
  });
  Eigen::VectorXd center = init_params(p, InitStrategy::LinearRamp, co.seed);
  if (!params_text.empty()) {
    const auto v = parse_list(params_text);
    if (static_cast<int>(v.size()) != 2 * p)
      throw CliError("--params needs " + std::to_string(2 * p) + " values for depth " + std::to_string(p));
    center = Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
  }
  LandscapeScan scan;
  if (u_text.empty() && v_text.empty()) {
    scan = landscape_scan(obj, center, extent, k);
  } else {
    const auto u = parse_list(u_text), v = parse_list(v_text);
    if (static_cast<int>(u.size()) != 2 * p || static_cast<int>(v.size()) != 2 * p)
      throw CliError("--u and --v need " + std::to_string(2 * p) + " values each");
    scan = landscape_scan(obj, center, Eigen::Map<const Eigen::VectorXd>(u.data(), 2 * p),
                          Eigen::Map<const Eigen::VectorXd>(v.data(), 2 * p), extent, extent, k);
  }
  export_landscape(scan, root / "landscape.csv", true);
  out << "wrote " << (root / "landscape.csv").string() << " (" << scan.energies.size() << " cells, depth " << p
      << ", " << obj.evaluations() << " evaluations)\n";
  return 0;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"qpath: solution-path workbench for QAOA-assisted vehicle routing"};
  app.set_config("--config", "", "TOML/INI file with the same keys as the flags");
  app.require_subcommand(1);

  GeneratorSpec gen;
  std::string gen_out, gen_name;
  bool gen_force = false;
  auto* generate = app.add_subcommand("generate", "write a random CVRP instance");
  generate->add_option("--n", gen.n, "customer count")->required();
  generate->add_option("--capacity", gen.capacity);
  generate->add_option("--demand-lo", gen.demand_lo);
  generate->add_option("--demand-hi", gen.demand_hi);
  generate->add_option("--bbox", gen.bbox, "side length of the square");
  generate->add_option("--seed", gen.seed);
  generate->add_option("--name", gen_name);
  generate->add_option("--out", gen_out)->required();
  generate->add_flag("--force", gen_force);

  CommonOptions solve_co;
  PathOptions solve_po;
  bool solve_landscape = false;
  int solve_k = 10;
  double solve_extent = 0.5;
  auto* solve = app.add_subcommand("solve", "run one solution path end to end");
  add_common(solve, solve_co);
  add_path(solve, solve_po);
  solve->add_flag("--landscape", solve_landscape, "also scan the loss landscape around the final parameters");
  solve->add_option("--landscape-k", solve_k)->check(CLI::PositiveNumber);
  solve->add_option("--landscape-extent", solve_extent);

  CommonOptions rec_co;
  std::string weights = "0.6,0.3,0.1";
  int jobs = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  std::map<std::string, std::string> restrictions{{level::kDecomposition, ""}, {level::kPenalty, ""},
                                                  {level::kScaling, ""},       {level::kAlgorithm, ""},
                                                  {level::kOptimizer, ""}};
  auto* recommend_cmd = app.add_subcommand("recommend", "evaluate and rank every solution path");
  add_common(recommend_cmd, rec_co);
  recommend_cmd->add_option("--weights", weights, "quality,feasibility,cost");
  recommend_cmd->add_option("--jobs", jobs, "parallel path evaluations")->check(CLI::PositiveNumber);
  recommend_cmd->add_option("--decompositions", restrictions[level::kDecomposition], "comma-separated subset");
  recommend_cmd->add_option("--penalties", restrictions[level::kPenalty], "comma-separated subset");
  recommend_cmd->add_option("--scalings", restrictions[level::kScaling], "comma-separated subset");
  recommend_cmd->add_option("--algorithms", restrictions[level::kAlgorithm], "comma-separated subset");
  recommend_cmd->add_option("--optimizers", restrictions[level::kOptimizer], "comma-separated subset");

  CommonOptions land_co;
  PathOptions land_po;
  int land_cluster = 0, land_k = 10;
  double land_extent = 0.5;
  std::string land_params, land_u, land_v;
  auto* landscape = app.add_subcommand("landscape", "scan a QAOA loss landscape over a plane");
  add_common(landscape, land_co);
  add_path(landscape, land_po);
  landscape->add_option("--cluster", land_cluster);
  landscape->add_option("--params", land_params, "plane center, comma-separated (default linear ramp)");
  landscape->add_option("--u", land_u, "first direction, comma-separated");
  landscape->add_option("--v", land_v, "second direction, comma-separated");
  landscape->add_option("--k", land_k, "grid half-resolution; (2k+1)^2 cells")->check(CLI::PositiveNumber);
  landscape->add_option("--extent", land_extent, "half-extent along each direction");

  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return e.get_exit_code() == 0 ? 2 : e.get_exit_code();
  }

  try {
    if (generate->parsed()) return cmd_generate(gen, gen_name, gen_out, gen_force, out);
    if (solve->parsed()) return cmd_solve(solve_co, solve_po, solve_landscape, solve_k, solve_extent, out);
    if (recommend_cmd->parsed()) return cmd_recommend(rec_co, weights, jobs, restrictions, out);
    if (landscape->parsed())
      return cmd_landscape(land_co, land_po, land_cluster, land_params, land_u, land_v, land_k, land_extent, out);
  } catch (const std::exception& e) {
    std::string msg = e.what();
    for (auto& c : msg)
      if (c == '\n') c = ' ';
    err << "error: " << msg << '\n';
    return 1;
  }
  err << "error: no subcommand given\n";
  return 2;
}

}  // namespace qpath
