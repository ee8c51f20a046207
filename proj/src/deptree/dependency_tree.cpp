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

#include "rwen/deptree/dependency_tree.hpp"

#include <algorithm>

namespace rwen::deptree {

const char* to_string(TreeError::Kind kind) {
  switch (kind) {
    case TreeError::Kind::kBadHead: return "bad-head";
    case TreeError::Kind::kDuplicateId: return "duplicate-id";
    case TreeError::Kind::kNoRoot: return "no-root";
    case TreeError::Kind::kMultipleRoots: return "multiple-roots";
    case TreeError::Kind::kCycle: return "cycle";
    case TreeError::Kind::kSelfLoop: return "self-loop";
    case TreeError::Kind::kSizeMismatch: return "size-mismatch";
    case TreeError::Kind::kIndexRange: return "index-range";
    case TreeError::Kind::kSyntax: return "syntax";
  }
  return "unknown";
}

void validate_heads(const std::vector<WordIndex>& heads) {
  const int n = static_cast<int>(heads.size());
  if (n == 0) throw TreeError(TreeError::Kind::kNoRoot, "empty tree has no root");
  int roots = 0;
  for (int i = 1; i <= n; ++i) {
    const WordIndex h = heads[static_cast<std::size_t>(i - 1)];
    if (h < 0 || h > n) {
      throw TreeError(TreeError::Kind::kBadHead,
                      "head of word " + std::to_string(i) + " is " + std::to_string(h) + ", outside [0, " +
                          std::to_string(n) + "]");
    }
    if (h == i) throw TreeError(TreeError::Kind::kSelfLoop, "word " + std::to_string(i) + " is its own head");
    if (h == 0) ++roots;
  }
  // Walk every word upward; a walk longer than n edges means a cycle. A cycle
  // is reported before a missing root, since a rootless tree always has one.
  for (int i = 1; i <= n; ++i) {
    WordIndex cur = i;
    int steps = 0;
    while (cur != 0) {
      cur = heads[static_cast<std::size_t>(cur - 1)];
      if (++steps > n) {
        throw TreeError(TreeError::Kind::kCycle, "cycle reached from word " + std::to_string(i));
      }
    }
  }
  if (roots == 0) throw TreeError(TreeError::Kind::kNoRoot, "no word attaches to the root");
  if (roots > 1) throw TreeError(TreeError::Kind::kMultipleRoots, std::to_string(roots) + " words attach to the root");
}

DependencyTree::DependencyTree(std::vector<WordIndex> heads, std::vector<std::string> rels)
    : heads_(std::move(heads)), rels_(std::move(rels)) {
  if (heads_.size() != rels_.size()) {
    throw TreeError(TreeError::Kind::kSizeMismatch, "heads and relation tags differ in length");
  }
  validate_heads(heads_);
  root_ = static_cast<WordIndex>(std::find(heads_.begin(), heads_.end(), 0) - heads_.begin()) + 1;
}

int DependencyTree::depth(WordIndex i) const {
  if (i < 1 || i > size()) throw TreeError(TreeError::Kind::kIndexRange, "word index " + std::to_string(i) + " out of range");
  int d = 0;
  for (WordIndex cur = head(i); cur != 0; cur = head(cur)) ++d;
  return d;
}

int DependencyTree::height() const {
  int h = 0;
  for (int i = 1; i <= size(); ++i) h = std::max(h, depth(i));
  return h;
}

}  // namespace rwen::deptree
