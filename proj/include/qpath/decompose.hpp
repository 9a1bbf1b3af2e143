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

#include "qpath/instances.hpp"

#include <string>
#include <utility>
#include <vector>

namespace qpath {

/// Disjoint customer groups; each `clusters[k]` is sorted ascending and the
/// clusters are ordered by their lowest member.
struct Clustering {
  std::vector<std::vector<int>> clusters;
  std::vector<int> demands;

  std::size_t size() const { return clusters.size(); }
};

/// Agglomerative clustering under the vehicle capacity. Starts from
/// singletons and repeatedly merges the closest feasible pair of clusters
/// (centroid linkage over customer coordinates, depot excluded) until no
/// merge fits in the capacity. Ties go to the pair whose lowest members are
/// lexicographically smallest. Instances without coordinates fall back to
/// average linkage over the distance matrix.
Clustering cluster_capacitated(const CvrpInstance& inst);

/// Throws InstanceError unless `cl` partitions the customers of `inst` into
/// capacity-feasible groups.
void check_clustering(const CvrpInstance& inst, const Clustering& cl);

/// One TSP per cluster: local node 0 is the depot, followed by the cluster's
/// members in ascending order.
std::vector<TspInstance> subproblems(const CvrpInstance& inst, const Clustering& cl);

/// Relabels per-cluster tours to instance indices, checks coverage and
/// capacity, and sums the closed tour lengths.
CvrpSolution assemble(const CvrpInstance& inst,
                      const std::vector<std::pair<TspInstance, Tour>>& tours);

/// {"clusters": [{"id", "nodes", "demand"}]}
std::string clustering_to_json(const Clustering& cl);

}  // namespace qpath
