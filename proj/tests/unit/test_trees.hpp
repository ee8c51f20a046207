/* Copyright 2026 The rwen-tts Authors. All Rights Reserved.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/

#pragma once

// Test-only tree generators and path oracles. Deliberately independent of the
// library's path code: the oracle walks an explicit undirected adjacency list.

#include <algorithm>
#include <queue>
#include <random>
#include <vector>

#include "rwen/deptree/dependency_tree.hpp"

namespace rwen::testing {

inline deptree::DependencyTree figure1_tree() {
  // "The blue shark with sharp teeth can eat fish quickly"
  return deptree::DependencyTree({3, 3, 8, 6, 6, 3, 8, 0, 8, 8},
                                 {"det", "amod", "nsubj", "case", "amod", "nmod", "aux", "root", "obj", "advmod"});
}

// Random tree over n words: a random permutation fixes insertion order, the
// first inserted word becomes the root and each later word picks a uniform
// parent among the words already inserted.
inline deptree::DependencyTree random_tree(std::mt19937_64& rng, int n) {
  std::vector<int> order(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) order[static_cast<std::size_t>(i)] = i + 1;
  std::shuffle(order.begin(), order.end(), rng);
  std::vector<int> heads(static_cast<std::size_t>(n), 0);
  for (int k = 1; k < n; ++k) {
    std::uniform_int_distribution<int> pick(0, k - 1);
    heads[static_cast<std::size_t>(order[static_cast<std::size_t>(k)] - 1)] = order[static_cast<std::size_t>(pick(rng))];
  }
  std::vector<std::string> rels(static_cast<std::size_t>(n), "dep");
  rels[static_cast<std::size_t>(order[0] - 1)] = "root";
  return deptree::DependencyTree(std::move(heads), std::move(rels));
}

// Shortest path on the undirected tree via breadth-first search.
inline std::vector<int> bfs_path(const deptree::DependencyTree& tree, int from, int to) {
  const int n = tree.size();
  std::vector<std::vector<int>> adj(static_cast<std::size_t>(n) + 1);
  for (int i = 1; i <= n; ++i) {
    if (tree.head(i) != 0) {
      adj[static_cast<std::size_t>(i)].push_back(tree.head(i));
      adj[static_cast<std::size_t>(tree.head(i))].push_back(i);
    }
  }
  std::vector<int> parent(static_cast<std::size_t>(n) + 1, -1);
  std::queue<int> q;
  q.push(from);
  parent[static_cast<std::size_t>(from)] = from;
  while (!q.empty()) {
    const int u = q.front();
    q.pop();
    if (u == to) break;
    for (const int v : adj[static_cast<std::size_t>(u)]) {
      if (parent[static_cast<std::size_t>(v)] < 0) {
        parent[static_cast<std::size_t>(v)] = u;
        q.push(v);
      }
    }
  }
  std::vector<int> path;
  for (int v = to; v != from; v = parent[static_cast<std::size_t>(v)]) path.push_back(v);
  path.push_back(from);
  std::reverse(path.begin(), path.end());
  return path;
}

inline std::vector<int> head_iteration_path(const deptree::DependencyTree& tree, int i) {
  std::vector<int> path;
  while (i != 0) {
    path.push_back(i);
    i = tree.head(i);
  }
  return path;
}

}  // namespace rwen::testing
