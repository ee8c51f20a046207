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

#include <cstdint>
#include <string_view>
#include <vector>

#include "rwen/deptree/dependency_tree.hpp"

namespace rwen::deptree {

// Step direction along a tree path; the integer values index the direction
// embedding table.
enum class Direction : std::uint8_t { kSelf = 0, kParent = 1, kChild = 2 };

enum class PathKind : std::uint8_t { kRoot, kPrev, kNext, kBoundary };

const char* to_string(Direction d);
const char* to_string(PathKind k);
PathKind parse_path_kind(std::string_view s);

// Index sequence through the tree. `directions[y]` describes the step from
// indexes[y-1] to indexes[y]; the first entry is always kSelf.
struct RelationPath {
  std::vector<WordIndex> indexes;
  std::vector<Direction> directions;
  PathKind kind = PathKind::kRoot;

  std::size_t size() const { return indexes.size(); }
  bool operator==(const RelationPath&) const = default;
};

// Word i up to the root: [i, head(i), head(head(i)), ..., root].
RelationPath root_path(const DependencyTree& tree, WordIndex i);

// Shortest undirected tree path from i to i-1 (kPrev) or i+1 (kNext), joined
// at the lowest common ancestor of the two root paths.
RelationPath adjacent_path(const DependencyTree& tree, WordIndex i, PathKind target);

// One path per slot 0..n+1. Slots 0 and n+1 ([CLS]/[SEP]) get boundary
// singletons; for kPrev at word 1 and kNext at word n the path is [i].
std::vector<RelationPath> sentence_paths(const DependencyTree& tree, PathKind kind);

// Direction of the single edge a -> b; throws if a and b are not adjacent.
Direction step_direction(const DependencyTree& tree, WordIndex a, WordIndex b);

}  // namespace rwen::deptree
