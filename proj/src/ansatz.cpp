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

#include "qpath/ansatz.hpp"

#include <algorithm>
#include <queue>

namespace qpath {

std::size_t InteractionGraph::edge_count() const {
  std::size_t twice = 0;
  for (const auto& nb : adjacency) twice += nb.size();
  return twice / 2;
}

bool InteractionGraph::has_edge(int i, int j) const {
  if (i < 0 || i >= n) return false;
  return std::binary_search(adjacency[i].begin(), adjacency[i].end(), j);
}

InteractionGraph interaction_graph(const IsingModel& im) {
  InteractionGraph g;
  g.n = im.n;
  g.adjacency.assign(im.n, {});
  for (const auto& c : im.J) {
    if (c.value == 0.0 || c.i == c.j) continue;
    g.adjacency[c.i].push_back(c.j);
    g.adjacency[c.j].push_back(c.i);
  }
  for (auto& nb : g.adjacency) {
    std::sort(nb.begin(), nb.end());
    nb.erase(std::unique(nb.begin(), nb.end()), nb.end());
  }
  return g;
}

int min_entangling_depth(const InteractionGraph& g) {
  if (g.n <= 0) throw AnsatzError("interaction graph has no vertices");
  int diameter = 0;
  std::vector<int> dist(g.n);
  for (int s = 0; s < g.n; ++s) {
    std::fill(dist.begin(), dist.end(), -1);
    std::queue<int> frontier;
    dist[s] = 0;
    frontier.push(s);
    int reached = 1;
    while (!frontier.empty()) {
      const int u = frontier.front();
      frontier.pop();
      for (int v : g.adjacency[u]) {
        if (dist[v] >= 0) continue;
        dist[v] = dist[u] + 1;
        diameter = std::max(diameter, dist[v]);
        ++reached;
        frontier.push(v);
      }
    }
    if (reached != g.n) throw AnsatzError("interaction graph is disconnected");
  }
  return diameter;
}

int recommend_depth(const InteractionGraph& g, std::optional<int> override_depth) {
  if (override_depth) {
    if (*override_depth < 0) throw AnsatzError("depth override must be nonnegative");
    return *override_depth;
  }
  return 2 * min_entangling_depth(g) + 1;
}

}  // namespace qpath
