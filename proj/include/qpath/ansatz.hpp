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

#include "qpath/encode.hpp"

#include <optional>
#include <stdexcept>
#include <utility>
#include <vector>

namespace qpath {

class AnsatzError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Qubits as vertices, an edge wherever the cost Hamiltonian couples two of them.
struct InteractionGraph {
  int n = 0;
  std::vector<std::vector<int>> adjacency;  // sorted neighbour lists

  std::size_t edge_count() const;
  bool has_edge(int i, int j) const;
};

/// Standard QAOA: p layers of cost phase followed by the X mixer.
struct QaoaAnsatz {
  IsingModel ising;
  int p = 1;

  int parameter_count() const { return 2 * p; }
};

InteractionGraph interaction_graph(const IsingModel& im);

/// Graph diameter: the fewest layers after which every qubit lies inside
/// every other qubit's causal cone. Throws on disconnected graphs.
int min_entangling_depth(const InteractionGraph& g);

/// 2 * min_entangling_depth + 1 unless `override_depth` is given.
int recommend_depth(const InteractionGraph& g, std::optional<int> override_depth = std::nullopt);

}  // namespace qpath
