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

#include "qpath/instances.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <map>
#include <random>
#include <sstream>

namespace qpath {

namespace {

using nlohmann::json;

constexpr double kSymmetryTol = 1e-9;

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

std::string upper(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(),
                 [](unsigned char c) { return static_cast<char>(std::toupper(c)); });
  return s;
}

void finish(CvrpInstance& inst) {
  if (inst.has_coords()) inst.distances = euclidean_distances(inst.coords);
  validate(inst);
}

CvrpInstance parse_native(std::istream& source) {
  json doc;
  try {
    doc = json::parse(source);
  } catch (const json::exception& e) {
    throw InstanceError(std::string("native instance: ") + e.what());
  }
  CvrpInstance inst;
  try {
    inst.name = doc.value("name", std::string{});
    inst.capacity = doc.at("capacity").get<int>();
    const int depot_id = doc.at("depot").get<int>();
    const auto& nodes = doc.at("nodes");
    if (!nodes.is_array() || nodes.empty()) throw InstanceError("native instance: empty node list");

    std::map<int, int> index_of;
    bool any_xy = false, all_xy = true;
    for (const auto& node : nodes) {
      const int id = node.at("id").get<int>();
      if (!index_of.emplace(id, static_cast<int>(inst.demands.size())).second)
        throw InstanceError("native instance: duplicate node id " + std::to_string(id));
      inst.demands.push_back(node.value("demand", 0));
      const bool has_xy = node.contains("x") && node.contains("y");
      any_xy = any_xy || has_xy;
      all_xy = all_xy && has_xy;
      if (has_xy) inst.coords.emplace_back(node.at("x").get<double>(), node.at("y").get<double>());
    }
    if (any_xy && !all_xy) throw InstanceError("native instance: coordinates given for some nodes only");
    const auto depot = index_of.find(depot_id);
    if (depot == index_of.end())
      throw InstanceError("native instance: depot id " + std::to_string(depot_id) + " is not a node");
    inst.depot = depot->second;

    if (!all_xy) {
      if (!doc.contains("distances"))
        throw InstanceError("native instance: neither coordinates nor distances given");
      const auto rows = doc.at("distances").get<std::vector<std::vector<double>>>();
      const auto m = static_cast<Eigen::Index>(inst.demands.size());
      if (static_cast<Eigen::Index>(rows.size()) != m)
        throw InstanceError("native instance: distance matrix has wrong row count");
      inst.distances.resize(m, m);
      for (Eigen::Index i = 0; i < m; ++i) {
        if (static_cast<Eigen::Index>(rows[i].size()) != m)
          throw InstanceError("native instance: distance row " + std::to_string(i) + " has wrong length");
        for (Eigen::Index j = 0; j < m; ++j) inst.distances(i, j) = rows[i][j];
      }
    }
  } catch (const json::exception& e) {
    throw InstanceError(std::string("native instance: ") + e.what());
  }
  finish(inst);
  return inst;
}

// TSPLIB/CVRPLIB-style text: NODE_COORD_SECTION, DEMAND_SECTION and an
// optional DEPOT_SECTION terminated by -1. Distances are exact Euclidean.
CvrpInstance parse_euc2d(std::istream& source) {
  CvrpInstance inst;
  enum class Section { Header, Coords, Demands, Depot } section = Section::Header;
  std::map<int, int> index_of;
  std::map<int, int> demand_of;
  int depot_id = std::numeric_limits<int>::min();
  bool capacity_seen = false;
  std::string line;
  int lineno = 0;
  auto fail = [&](const std::string& what) {
    throw InstanceError("euc2d line " + std::to_string(lineno) + ": " + what);
  };
  while (std::getline(source, line)) {
    ++lineno;
    const std::string t = trim(line);
    if (t.empty()) continue;
    const std::string key = upper(t);
    if (key == "EOF") break;
    if (key.starts_with("NODE_COORD_SECTION")) { section = Section::Coords; continue; }
    if (key.starts_with("DEMAND_SECTION")) { section = Section::Demands; continue; }
    if (key.starts_with("DEPOT_SECTION")) { section = Section::Depot; continue; }
    if (const auto colon = t.find(':'); colon != std::string::npos && !std::isdigit(static_cast<unsigned char>(t[0])) && t[0] != '-') {
      const std::string field = upper(trim(t.substr(0, colon)));
      const std::string value = trim(t.substr(colon + 1));
      if (field == "NAME") inst.name = value;
      else if (field == "CAPACITY") {
        try { inst.capacity = std::stoi(value); } catch (...) { fail("bad CAPACITY"); }
        capacity_seen = true;
      }
      section = Section::Header;
      continue;
    }
    std::istringstream row(t);
    switch (section) {
      case Section::Coords: {
        int id; double x, y;
        if (!(row >> id >> x >> y)) fail("expected 'id x y'");
        if (!index_of.emplace(id, static_cast<int>(inst.coords.size())).second)
          fail("duplicate node id " + std::to_string(id));
        inst.coords.emplace_back(x, y);
        break;
      }
      case Section::Demands: {
        int id, d;
        if (!(row >> id >> d)) fail("expected 'id demand'");
        demand_of[id] = d;
        break;
      }
      case Section::Depot: {
        int id;
        if (!(row >> id)) fail("expected depot id");
        if (id >= 0 && depot_id == std::numeric_limits<int>::min()) depot_id = id;
        break;
      }
      case Section::Header:
        fail("unexpected content outside a section");
    }
  }
  if (inst.coords.empty()) throw InstanceError("euc2d: no NODE_COORD_SECTION entries");
  if (!capacity_seen) throw InstanceError("euc2d: missing CAPACITY");
  inst.demands.assign(inst.coords.size(), 0);
  for (const auto& [id, d] : demand_of) {
    const auto it = index_of.find(id);
    if (it == index_of.end()) throw InstanceError("euc2d: demand for unknown node " + std::to_string(id));
    inst.demands[it->second] = d;
  }
  if (depot_id == std::numeric_limits<int>::min()) {
    inst.depot = 0;
  } else {
    const auto it = index_of.find(depot_id);
    if (it == index_of.end()) throw InstanceError("euc2d: unknown depot " + std::to_string(depot_id));
    inst.depot = it->second;
  }
  finish(inst);
  return inst;
}

void check_matrix(const DistanceMatrix& d, const char* what) {
  if (d.rows() != d.cols()) throw InstanceError(std::string(what) + ": distance matrix not square");
  for (Eigen::Index i = 0; i < d.rows(); ++i) {
    if (d(i, i) != 0.0) throw InstanceError(std::string(what) + ": nonzero diagonal at node " + std::to_string(i));
    for (Eigen::Index j = 0; j < d.cols(); ++j) {
      if (!std::isfinite(d(i, j)) || d(i, j) < 0.0)
        throw InstanceError(std::string(what) + ": negative or non-finite distance at (" +
                            std::to_string(i) + "," + std::to_string(j) + ")");
      if (std::abs(d(i, j) - d(j, i)) > kSymmetryTol)
        throw InstanceError(std::string(what) + ": asymmetric distance at (" + std::to_string(i) +
                            "," + std::to_string(j) + ")");
    }
  }
}

}  // namespace

std::vector<int> CvrpInstance::customers() const {
  std::vector<int> out;
  for (int v = 0; v < node_count(); ++v)
    if (v != depot) out.push_back(v);
  return out;
}

DistanceMatrix euclidean_distances(const std::vector<Point>& coords) {
  const auto m = static_cast<Eigen::Index>(coords.size());
  DistanceMatrix d = DistanceMatrix::Zero(m, m);
  for (Eigen::Index i = 0; i < m; ++i)
    for (Eigen::Index j = i + 1; j < m; ++j) d(i, j) = d(j, i) = (coords[i] - coords[j]).norm();
  return d;
}

void validate(const CvrpInstance& inst) {
  const int m = inst.node_count();
  if (m < 1) throw InstanceError("instance has no nodes");
  if (inst.capacity <= 0) throw InstanceError("capacity must be positive");
  if (inst.depot < 0 || inst.depot >= m) throw InstanceError("depot index out of range");
  if (inst.distances.rows() != m) throw InstanceError("distance matrix size does not match node count");
  if (inst.has_coords() && static_cast<int>(inst.coords.size()) != m)
    throw InstanceError("coordinate count does not match node count");
  check_matrix(inst.distances, "instance");
  if (inst.has_coords()) {
    for (int i = 0; i < m; ++i)
      for (int j = 0; j < m; ++j)
        if (std::abs(inst.distances(i, j) - (inst.coords[i] - inst.coords[j]).norm()) > 1e-9)
          throw InstanceError("distance (" + std::to_string(i) + "," + std::to_string(j) +
                              ") disagrees with coordinates");
  }
  if (inst.demands[inst.depot] != 0) throw InstanceError("depot demand must be 0");
  for (int v = 0; v < m; ++v) {
    if (v == inst.depot) continue;
    if (inst.demands[v] <= 0)
      throw InstanceError("node " + std::to_string(v) + ": demand must be positive");
    if (inst.demands[v] > inst.capacity)
      throw InstanceError("node " + std::to_string(v) + ": demand " + std::to_string(inst.demands[v]) +
                          " exceeds capacity " + std::to_string(inst.capacity));
  }
}

void validate(const TspInstance& tsp) {
  const int m = tsp.size();
  if (m < 1) throw InstanceError("tsp has no nodes");
  check_matrix(tsp.distances, "tsp");
  if (tsp.start < 0 || tsp.start >= m) throw InstanceError("tsp start out of range");
  if (static_cast<int>(tsp.origin_labels.size()) != m) throw InstanceError("tsp label count mismatch");
  std::vector<int> labels = tsp.origin_labels;
  std::sort(labels.begin(), labels.end());
  if (std::adjacent_find(labels.begin(), labels.end()) != labels.end())
    throw InstanceError("tsp origin labels are not injective");
  if (tsp.has_coords() && static_cast<int>(tsp.coords.size()) != m)
    throw InstanceError("tsp coordinate count mismatch");
}

CvrpInstance load_instance(std::istream& source, InstanceFormat format) {
  return format == InstanceFormat::Native ? parse_native(source) : parse_euc2d(source);
}

CvrpInstance load_instance_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InstanceError("cannot open " + path);
  // Native documents are JSON objects; anything else is treated as EUC_2D text.
  char first = 0;
  while (in.get(first) && std::isspace(static_cast<unsigned char>(first))) {}
  in.clear();
  in.seekg(0);
  return load_instance(in, first == '{' ? InstanceFormat::Native : InstanceFormat::Euc2dText);
}

void write_instance(std::ostream& out, const CvrpInstance& inst) {
  json doc;
  doc["format"] = "qpath-cvrp";
  doc["version"] = 1;
  doc["name"] = inst.name;
  doc["capacity"] = inst.capacity;
  doc["depot"] = inst.depot;
  json nodes = json::array();
  for (int v = 0; v < inst.node_count(); ++v) {
    json node{{"id", v}, {"demand", inst.demands[v]}};
    if (inst.has_coords()) {
      node["x"] = inst.coords[v].x();
      node["y"] = inst.coords[v].y();
    }
    nodes.push_back(std::move(node));
  }
  doc["nodes"] = std::move(nodes);
  if (!inst.has_coords()) {
    json rows = json::array();
    for (Eigen::Index i = 0; i < inst.distances.rows(); ++i) {
      json row = json::array();
      for (Eigen::Index j = 0; j < inst.distances.cols(); ++j) row.push_back(inst.distances(i, j));
      rows.push_back(std::move(row));
    }
    doc["distances"] = std::move(rows);
  }
  out << doc.dump(2) << '\n';
}

CvrpInstance generate_random(const GeneratorSpec& spec) {
  if (spec.n < 0) throw InstanceError("node count must be nonnegative");
  if (spec.capacity <= 0) throw InstanceError("capacity must be positive");
  if (spec.demand_lo < 1 || spec.demand_hi < spec.demand_lo || spec.demand_hi > spec.capacity)
    throw InstanceError("demand range must satisfy 1 <= lo <= hi <= capacity");
  if (!(spec.bbox > 0.0)) throw InstanceError("bounding box side must be positive");

  std::mt19937_64 rng(spec.seed);
  std::uniform_real_distribution<double> coord(0.0, spec.bbox);
  std::uniform_int_distribution<int> demand(spec.demand_lo, spec.demand_hi);

  CvrpInstance inst;
  inst.name = "random-n" + std::to_string(spec.n) + "-s" + std::to_string(spec.seed);
  inst.capacity = spec.capacity;
  inst.depot = 0;
  inst.coords.emplace_back(spec.bbox / 2.0, spec.bbox / 2.0);
  inst.demands.push_back(0);
  for (int i = 0; i < spec.n; ++i) {
    const double x = coord(rng);
    const double y = coord(rng);
    inst.coords.emplace_back(x, y);
    inst.demands.push_back(demand(rng));
  }
  finish(inst);
  return inst;
}

TspInstance make_tsp(const CvrpInstance& inst, const std::vector<int>& nodes) {
  TspInstance t;
  const auto m = static_cast<Eigen::Index>(nodes.size());
  t.distances.resize(m, m);
  for (Eigen::Index i = 0; i < m; ++i)
    for (Eigen::Index j = 0; j < m; ++j) t.distances(i, j) = inst.distances(nodes[i], nodes[j]);
  t.origin_labels = nodes;
  t.start = 0;
  if (inst.has_coords())
    for (int v : nodes) t.coords.push_back(inst.coords[v]);
  validate(t);
  return t;
}

TspInstance make_tsp(DistanceMatrix distances) {
  TspInstance t;
  t.distances = std::move(distances);
  t.origin_labels.resize(t.distances.rows());
  for (int i = 0; i < static_cast<int>(t.origin_labels.size()); ++i) t.origin_labels[i] = i;
  validate(t);
  return t;
}

void check_tour(const TspInstance& t, const Tour& tour) {
  const int m = t.size();
  if (static_cast<int>(tour.order.size()) != m) throw InstanceError("tour length does not match node count");
  if (m > 0 && tour.order.front() != t.start) throw InstanceError("tour does not begin at the start node");
  std::vector<char> seen(m, 0);
  for (int v : tour.order) {
    if (v < 0 || v >= m || seen[v]) throw InstanceError("tour is not a permutation");
    seen[v] = 1;
  }
}

double tour_length(const TspInstance& t, const Tour& tour) {
  check_tour(t, tour);
  return closed_length(t.distances, tour.order);
}

TourResult solve_tsp_exact(const TspInstance& t) {
  const int m = t.size();
  if (m > kHeldKarpMaxNodes)
    throw InstanceError("exact TSP limited to " + std::to_string(kHeldKarpMaxNodes) + " nodes, got " +
                        std::to_string(m));
  if (m < 1) throw InstanceError("tsp has no nodes");
  std::vector<int> others;
  for (int v = 0; v < m; ++v)
    if (v != t.start) others.push_back(v);
  const int k = static_cast<int>(others.size());
  if (k == 0) return {Tour{{t.start}}, 0.0};

  const auto& d = t.distances;
  const std::size_t full = std::size_t{1} << k;
  constexpr double inf = std::numeric_limits<double>::infinity();
  // cost[mask * k + j]: shortest path from start through `mask`, ending at others[j].
  std::vector<double> cost(full * k, inf);
  std::vector<int> parent(full * k, -1);
  for (int j = 0; j < k; ++j) cost[(std::size_t{1} << j) * k + j] = d(t.start, others[j]);
  for (std::size_t mask = 1; mask < full; ++mask) {
    for (int j = 0; j < k; ++j) {
      if (!(mask >> j & 1)) continue;
      const double base = cost[mask * k + j];
      if (base == inf) continue;
      for (int nxt = 0; nxt < k; ++nxt) {
        if (mask >> nxt & 1) continue;
        const std::size_t nmask = mask | (std::size_t{1} << nxt);
        const double c = base + d(others[j], others[nxt]);
        if (c < cost[nmask * k + nxt]) {
          cost[nmask * k + nxt] = c;
          parent[nmask * k + nxt] = j;
        }
      }
    }
  }
  const std::size_t all = full - 1;
  int last = 0;
  double best = inf;
  for (int j = 0; j < k; ++j) {
    const double c = cost[all * k + j] + d(others[j], t.start);
    if (c < best) {
      best = c;
      last = j;
    }
  }
  std::vector<int> rev;
  std::size_t mask = all;
  for (int j = last; j != -1;) {
    rev.push_back(others[j]);
    const int p = parent[mask * k + j];
    mask &= ~(std::size_t{1} << j);
    j = p;
  }
  Tour tour{{t.start}};
  tour.order.insert(tour.order.end(), rev.rbegin(), rev.rend());
  return {tour, closed_length(d, tour.order)};
}

TourResult solve_tsp_heuristic(const TspInstance& t) {
  const int m = t.size();
  if (m < 1) throw InstanceError("tsp has no nodes");
  const auto& d = t.distances;
  std::vector<char> used(m, 0);
  std::vector<int> order{t.start};
  used[t.start] = 1;
  while (static_cast<int>(order.size()) < m) {
    const int cur = order.back();
    int pick = -1;
    for (int v = 0; v < m; ++v)
      if (!used[v] && (pick < 0 || d(cur, v) < d(cur, pick))) pick = v;
    used[pick] = 1;
    order.push_back(pick);
  }
  // 2-opt over positions 1..m-1; position 0 stays at the start node.
  constexpr double eps = 1e-12;
  bool improved = m >= 4;
  while (improved) {
    improved = false;
    for (int i = 1; i + 1 < m && !improved; ++i) {
      for (int j = i + 1; j < m && !improved; ++j) {
        const int a = order[i - 1], b = order[i];
        const int c = order[j], e = order[(j + 1) % m];
        const double delta = d(a, c) + d(b, e) - d(a, b) - d(c, e);
        if (delta < -eps) {
          std::reverse(order.begin() + i, order.begin() + j + 1);
          improved = true;
        }
      }
    }
  }
  Tour tour{std::move(order)};
  const double len = closed_length(d, tour.order);
  return {std::move(tour), len};
}

}  // namespace qpath
