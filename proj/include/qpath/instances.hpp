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

#include <Eigen/Dense>

#include <cstdint>
#include <istream>
#include <ostream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace qpath {

using DistanceMatrix = Eigen::MatrixXd;
using Point = Eigen::Vector2d;

/// Raised for malformed instance files and instances that violate the
/// CVRP invariants (asymmetric distances, demand above capacity, ...).
class InstanceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A capacitated vehicle routing instance on a complete graph of
/// `node_count()` nodes, one of which is the depot.
struct CvrpInstance {
  std::string name;
  std::vector<Point> coords;  // empty when only distances are known
  int depot = 0;
  std::vector<int> demands;
  int capacity = 1;
  DistanceMatrix distances;

  int node_count() const { return static_cast<int>(demands.size()); }
  int customer_count() const { return node_count() > 0 ? node_count() - 1 : 0; }
  bool has_coords() const { return !coords.empty(); }
  std::vector<int> customers() const;
};

/// One routing subproblem. Local indices 0..m-1; `origin_labels[i]` is the
/// CvrpInstance index of local node i.
struct TspInstance {
  DistanceMatrix distances;
  std::vector<int> origin_labels;
  int start = 0;
  std::vector<Point> coords;

  int size() const { return static_cast<int>(distances.rows()); }
  bool has_coords() const { return !coords.empty(); }
};

struct Tour {
  std::vector<int> order;

  friend bool operator==(const Tour&, const Tour&) = default;
};

struct CvrpSolution {
  std::vector<Tour> tours;
  double total_length = 0.0;
};

struct TourResult {
  Tour tour;
  double length = 0.0;
};

enum class InstanceFormat { Native, Euc2dText };

/// Euclidean distance matrix of a point set.
DistanceMatrix euclidean_distances(const std::vector<Point>& coords);

/// Throws InstanceError if the instance breaks any CvrpInstance invariant.
void validate(const CvrpInstance& inst);
void validate(const TspInstance& tsp);

CvrpInstance load_instance(std::istream& source, InstanceFormat format);
CvrpInstance load_instance_file(const std::string& path);
void write_instance(std::ostream& out, const CvrpInstance& inst);

struct GeneratorSpec {
  int n = 0;
  int capacity = 5;
  int demand_lo = 1;
  int demand_hi = 3;
  double bbox = 10.0;
  std::uint64_t seed = 0;
};

/// Depot at the bounding-box center, customers uniform in [0, bbox]^2.
CvrpInstance generate_random(const GeneratorSpec& spec);

/// Restrict the instance to `nodes` (CvrpInstance indices); the first entry
/// becomes the start node.
TspInstance make_tsp(const CvrpInstance& inst, const std::vector<int>& nodes);

/// TspInstance from a bare distance matrix, start 0 and identity labels.
TspInstance make_tsp(DistanceMatrix distances);

constexpr int kHeldKarpMaxNodes = 14;

/// Held-Karp. Hard error above kHeldKarpMaxNodes.
TourResult solve_tsp_exact(const TspInstance& t);

/// Nearest neighbour from the start (lowest index wins ties), then 2-opt
/// until no improving move remains.
TourResult solve_tsp_heuristic(const TspInstance& t);

/// Throws InstanceError unless `tour` is a permutation of 0..m-1 that begins
/// at t.start.
void check_tour(const TspInstance& t, const Tour& tour);

/// Closed tour length over any dense distance matrix.
template <typename Derived>
typename Derived::Scalar closed_length(const Eigen::MatrixBase<Derived>& d,
                                       const std::vector<int>& order) {
  using Scalar = typename Derived::Scalar;
  Scalar sum(0);
  const auto k = order.size();
  if (k < 2) return sum;
  for (std::size_t i = 0; i + 1 < k; ++i) sum += d(order[i], order[i + 1]);
  sum += d(order[k - 1], order[0]);
  return sum;
}

double tour_length(const TspInstance& t, const Tour& tour);

}  // namespace qpath
