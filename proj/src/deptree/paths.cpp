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

#include "rwen/deptree/paths.hpp"

#include <algorithm>
#include <stdexcept>
#include <string>

namespace rwen::deptree {

namespace {

void check_word(const DependencyTree& tree, WordIndex i) {
  if (i < 1 || i > tree.size()) {
    throw TreeError(TreeError::Kind::kIndexRange,
                    "word index " + std::to_string(i) + " outside [1, " + std::to_string(tree.size()) + "]");
  }
}

std::vector<WordIndex> ancestors_inclusive(const DependencyTree& tree, WordIndex i) {
  std::vector<WordIndex> chain;
  for (WordIndex cur = i; cur != 0; cur = tree.head(cur)) chain.push_back(cur);
  return chain;
}

void fill_directions(const DependencyTree& tree, RelationPath& path) {
  path.directions.assign(path.indexes.size(), Direction::kSelf);
  for (std::size_t y = 1; y < path.indexes.size(); ++y) {
    path.directions[y] = step_direction(tree, path.indexes[y - 1], path.indexes[y]);
  }
}

RelationPath singleton(WordIndex slot, PathKind kind) {
  return RelationPath{{slot}, {Direction::kSelf}, kind};
}

}  // namespace

const char* to_string(Direction d) {
  switch (d) {
    case Direction::kSelf: return "self";
    case Direction::kParent: return "parent";
    case Direction::kChild: return "child";
  }
  return "?";
}

const char* to_string(PathKind k) {
  switch (k) {
    case PathKind::kRoot: return "root";
    case PathKind::kPrev: return "prev";
    case PathKind::kNext: return "next";
    case PathKind::kBoundary: return "boundary";
  }
  return "?";
}

PathKind parse_path_kind(std::string_view s) {
  if (s == "root") return PathKind::kRoot;
  if (s == "prev") return PathKind::kPrev;
  if (s == "next") return PathKind::kNext;
  throw std::invalid_argument("unknown path kind '" + std::string(s) + "' (expected root, prev or next)");
}

Direction step_direction(const DependencyTree& tree, WordIndex a, WordIndex b) {
  if (a >= 1 && a <= tree.size() && tree.head(a) == b) return Direction::kParent;
  if (b >= 1 && b <= tree.size() && tree.head(b) == a) return Direction::kChild;
  throw TreeError(TreeError::Kind::kIndexRange,
                  "words " + std::to_string(a) + " and " + std::to_string(b) + " are not tree-adjacent");
}

RelationPath root_path(const DependencyTree& tree, WordIndex i) {
  check_word(tree, i);
  RelationPath path;
  path.kind = PathKind::kRoot;
  path.indexes = ancestors_inclusive(tree, i);
  path.directions.assign(path.indexes.size(), Direction::kParent);
  path.directions[0] = Direction::kSelf;
  return path;
}

RelationPath adjacent_path(const DependencyTree& tree, WordIndex i, PathKind target) {
  check_word(tree, i);
  WordIndex other = 0;
  if (target == PathKind::kPrev) {
    other = i - 1;
  } else if (target == PathKind::kNext) {
    other = i + 1;
  } else {
    throw std::invalid_argument("adjacent_path target must be prev or next");
  }
  if (other < 1 || other > tree.size()) {
    throw TreeError(TreeError::Kind::kIndexRange,
                    std::string(to_string(target)) + " word of " + std::to_string(i) + " does not exist");
  }

  // Mark the ancestors of i, then climb from the other word until a marked
  // node is hit; that node is the lowest common ancestor.
  const std::vector<WordIndex> up = ancestors_inclusive(tree, i);
  std::vector<int> position(static_cast<std::size_t>(tree.size()) + 1, -1);
  for (std::size_t k = 0; k < up.size(); ++k) position[static_cast<std::size_t>(up[k])] = static_cast<int>(k);

  std::vector<WordIndex> down;
  WordIndex cur = other;
  while (position[static_cast<std::size_t>(cur)] < 0) {
    down.push_back(cur);
    cur = tree.head(cur);
  }
  const int lca_pos = position[static_cast<std::size_t>(cur)];

  RelationPath path;
  path.kind = target;
  path.indexes.assign(up.begin(), up.begin() + lca_pos + 1);
  path.indexes.insert(path.indexes.end(), down.rbegin(), down.rend());
  fill_directions(tree, path);
  return path;
}

std::vector<RelationPath> sentence_paths(const DependencyTree& tree, PathKind kind) {
  const int n = tree.size();
  std::vector<RelationPath> paths;
  paths.reserve(static_cast<std::size_t>(n) + 2);
  paths.push_back(singleton(0, PathKind::kBoundary));
  for (WordIndex i = 1; i <= n; ++i) {
    switch (kind) {
      case PathKind::kRoot:
        paths.push_back(root_path(tree, i));
        break;
      case PathKind::kPrev:
        paths.push_back(i == 1 ? singleton(i, kind) : adjacent_path(tree, i, kind));
        break;
      case PathKind::kNext:
        paths.push_back(i == n ? singleton(i, kind) : adjacent_path(tree, i, kind));
        break;
      case PathKind::kBoundary:
        throw std::invalid_argument("sentence_paths kind must be root, prev or next");
    }
  }
  paths.push_back(singleton(n + 1, PathKind::kBoundary));
  return paths;
}

}  // namespace rwen::deptree
