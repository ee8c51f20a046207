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
#include <stdexcept>
#include <string>
#include <vector>

namespace rwen::deptree {

// Word indexes are 1-based; 0 is the virtual root. Sentence-level slot
// vectors use 0 for [CLS] and n+1 for [SEP].
using WordIndex = int;

class TreeError : public std::runtime_error {
 public:
  enum class Kind { kBadHead, kDuplicateId, kNoRoot, kMultipleRoots, kCycle, kSelfLoop, kSizeMismatch, kIndexRange, kSyntax };

  TreeError(Kind kind, const std::string& message) : std::runtime_error(message), kind_(kind) {}
  Kind kind() const { return kind_; }

 private:
  Kind kind_;
};

const char* to_string(TreeError::Kind kind);

// Heads and relation tags for one sentence. Immutable once constructed;
// the constructor enforces the single-root/acyclic invariants.
class DependencyTree {
 public:
  DependencyTree() = default;

  // `heads[k]` and `rels[k]` describe word k+1.
  DependencyTree(std::vector<WordIndex> heads, std::vector<std::string> rels);

  int size() const { return static_cast<int>(heads_.size()); }
  WordIndex head(WordIndex i) const { return heads_.at(static_cast<std::size_t>(i - 1)); }
  const std::string& rel(WordIndex i) const { return rels_.at(static_cast<std::size_t>(i - 1)); }
  WordIndex root() const { return root_; }

  // Number of edges from word i to the root.
  int depth(WordIndex i) const;
  // Maximum depth over all words.
  int height() const;

  const std::vector<WordIndex>& heads() const { return heads_; }
  const std::vector<std::string>& rels() const { return rels_; }

  bool operator==(const DependencyTree& other) const = default;

 private:
  std::vector<WordIndex> heads_;
  std::vector<std::string> rels_;
  WordIndex root_ = 0;
};

// Checks the tree invariants on raw head arrays without constructing a tree.
// Throws TreeError describing the first violation.
void validate_heads(const std::vector<WordIndex>& heads);

}  // namespace rwen::deptree
