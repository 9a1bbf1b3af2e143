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

#include "qpath/decompose.hpp"

#include <json.hpp>

#include <algorithm>
#include <limits>

namespace qpath {

namespace {

constexpr double kTieTol = 1e-12;

double linkage(const CvrpInstance& inst, const std::vector<int>& a, const std::vector<int>& b) {
  if (inst.has_coords()) {
    Point ca = Point::Zero(), cb = Point::Zero();
    for (int v : a) ca += inst.coords[v];
    for (int v : b) cb += inst.coords[v];
    ca /= static_cast<double>(a.size());
    cb /= static_cast<double>(b.size());
    return (ca - cb).norm();
  }
  double sum = 0.0;
  for (int u : a)
    for (int v : b) sum += inst.distances(u, v);
  return sum / static_cast<double>(a.size() * b.size());
}

}  // namespace

Clustering cluster_capacitated(const CvrpInstance& inst) {
  Clustering cl;
  for (int v : inst.customers()) {
    cl.clusters.push_back({v});
    cl.demands.push_back(inst.demands[v]);
  }
  for (;;) {
    const std::size_t k = cl.clusters.size();
    double best = std::numeric_limits<double>::infinity();
    std::size_t bi = 0, bj = 0;
    bool found = false;
    // Clusters are kept ordered by lowest member, so scanning (i, j) with i < j
    // in order visits pairs in the lexicographic tie-break order.
    for (std::size_t i = 0; i < k; ++i) {
      for (std::size_t j = i + 1; j < k; ++j) {
        if (cl.demands[i] + cl.demands[j] > inst.capacity) continue;
        const double dist = linkage(inst, cl.clusters[i], cl.clusters[j]);
        if (!found || dist < best - kTieTol) {
          best = dist;
          bi = i;
          bj = j;
          found = true;
        }
      }
    }
    if (!found) break;
    auto& into = cl.clusters[bi];
    into.insert(into.end(), cl.clusters[bj].begin(), cl.clusters[bj].end());
    std::sort(into.begin(), into.end());
    cl.demands[bi] += cl.demands[bj];
    cl.clusters.erase(cl.clusters.begin() + static_cast<std::ptrdiff_t>(bj));
    cl.demands.erase(cl.demands.begin() + static_cast<std::ptrdiff_t>(bj));
  }
  return cl;
}

void check_clustering(const CvrpInstance& inst, const Clustering& cl) {
  if (cl.demands.size() != cl.clusters.size()) throw InstanceError("clustering demand list mismatch");
  std::vector<int> seen(inst.node_count(), 0);
  for (std::size_t k = 0; k < cl.clusters.size(); ++k) {
    int demand = 0;
    if (cl.clusters[k].empty()) throw InstanceError("empty cluster " + std::to_string(k));
    for (int v : cl.clusters[k]) {
      if (v < 0 || v >= inst.node_count() || v == inst.depot)
        throw InstanceError("cluster " + std::to_string(k) + " holds invalid node " + std::to_string(v));
      if (seen[v]++) throw InstanceError("node " + std::to_string(v) + " appears in two clusters");
      demand += inst.demands[v];
    }
    if (demand != cl.demands[k]) throw InstanceError("cluster " + std::to_string(k) + " demand mismatch");
    if (demand > inst.capacity) throw InstanceError("cluster " + std::to_string(k) + " exceeds capacity");
  }
  for (int v : inst.customers())
    if (!seen[v]) throw InstanceError("node " + std::to_string(v) + " is not clustered");
}

std::vector<TspInstance> subproblems(const CvrpInstance& inst, const Clustering& cl) {
  check_clustering(inst, cl);
  std::vector<TspInstance> out;
  out.reserve(cl.size());
  for (const auto& members : cl.clusters) {
    std::vector<int> nodes{inst.depot};
    nodes.insert(nodes.end(), members.begin(), members.end());
    out.push_back(make_tsp(inst, nodes));
  }
  return out;
}

CvrpSolution assemble(const CvrpInstance& inst,
                      const std::vector<std::pair<TspInstance, Tour>>& tours) {
  CvrpSolution sol;
  std::vector<int> seen(inst.node_count(), 0);
  for (const auto& [tsp, local] : tours) {
    check_tour(tsp, local);
    if (tsp.origin_labels[tsp.start] != inst.depot) throw InstanceError("tour does not start at the depot");
    Tour global;
    int load = 0;
    for (int v : local.order) {
      const int g = tsp.origin_labels[v];
      if (g < 0 || g >= inst.node_count()) throw InstanceError("tour label out of range");
      global.order.push_back(g);
      if (g == inst.depot) continue;
      if (seen[g]++) throw InstanceError("node " + std::to_string(g) + " visited by two tours");
      load += inst.demands[g];
    }
    if (load > inst.capacity) throw InstanceError("tour load exceeds capacity");
    sol.total_length += closed_length(inst.distances, global.order);
    sol.tours.push_back(std::move(global));
  }
  for (int v : inst.customers())
    if (!seen[v]) throw InstanceError("node " + std::to_string(v) + " not covered by any tour");
  return sol;
}

std::string clustering_to_json(const Clustering& cl) {
  nlohmann::json doc;
  nlohmann::json arr = nlohmann::json::array();
  for (std::size_t k = 0; k < cl.size(); ++k)
    arr.push_back({{"id", k}, {"nodes", cl.clusters[k]}, {"demand", cl.demands[k]}});
  doc["clusters"] = std::move(arr);
  return doc.dump(2);
}

}  // namespace qpath
