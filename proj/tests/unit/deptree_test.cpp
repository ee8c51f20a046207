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

#include <gtest/gtest.h>

#include <fstream>
#include <random>
#include <sstream>

#include "rwen/deptree/conllu.hpp"
#include "rwen/deptree/paths.hpp"
#include "test_trees.hpp"

namespace rwen::deptree {
namespace {

using rwen::testing::bfs_path;
using rwen::testing::figure1_tree;
using rwen::testing::head_iteration_path;
using rwen::testing::random_tree;

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string line(int id, const std::string& form, const std::string& head, const std::string& rel) {
  return std::to_string(id) + "\t" + form + "\t_\t_\t_\t_\t" + head + "\t" + rel + "\t_\t_\n";
}

TreeError::Kind parse_error_kind(const std::string& text) {
  try {
    parse_conllu(text);
  } catch (const ConlluError& e) {
    return e.kind();
  }
  ADD_FAILURE() << "expected a parse error";
  return TreeError::Kind::kSyntax;
}

TEST(DependencyTree, TwoWordSentence) {
  const auto sentences = parse_conllu(line(1, "Dogs", "2", "nsubj") + line(2, "bark", "0", "root") + "\n");
  ASSERT_EQ(sentences.size(), 1u);
  const DependencyTree& t = sentences[0].tree;
  EXPECT_EQ(t.size(), 2);
  EXPECT_EQ(t.root(), 2);
  EXPECT_EQ(t.head(1), 2);
  EXPECT_EQ(t.rel(1), "nsubj");
  EXPECT_EQ(sentences[0].forms, (std::vector<std::string>{"Dogs", "bark"}));
}

TEST(DependencyTree, CycleWithoutRootIsRejected) {
  EXPECT_EQ(parse_error_kind(line(1, "a", "2", "dep") + line(2, "b", "1", "dep")), TreeError::Kind::kCycle);
  EXPECT_THROW(DependencyTree({2, 1}, {"dep", "dep"}), TreeError);
}

TEST(DependencyTree, ErrorKindsAreDistinct) {
  EXPECT_EQ(parse_error_kind(line(1, "a", "x", "root")), TreeError::Kind::kBadHead);
  EXPECT_EQ(parse_error_kind(line(1, "a", "5", "root")), TreeError::Kind::kBadHead);
  EXPECT_EQ(parse_error_kind(line(1, "a", "0", "root") + line(1, "b", "1", "dep")), TreeError::Kind::kDuplicateId);
  EXPECT_EQ(parse_error_kind(line(1, "a", "0", "root") + line(2, "b", "0", "root")), TreeError::Kind::kMultipleRoots);
  EXPECT_EQ(parse_error_kind(line(1, "a", "1", "root")), TreeError::Kind::kSelfLoop);
  // Cycle among 2 and 3 while 1 is the root.
  EXPECT_EQ(parse_error_kind(line(1, "a", "0", "root") + line(2, "b", "3", "dep") + line(3, "c", "2", "dep")),
            TreeError::Kind::kCycle);
  EXPECT_EQ(parse_error_kind("1\ta\t_\t_\n"), TreeError::Kind::kSyntax);
}

TEST(DependencyTree, ErrorsNameSentenceAndLine) {
  const std::string text = line(1, "ok", "0", "root") + "\n" + "# comment\n" + line(1, "a", "0", "root") +
                           line(2, "b", "9", "dep");
  try {
    parse_conllu(text);
    FAIL() << "expected error";
  } catch (const ConlluError& e) {
    EXPECT_EQ(e.sentence_index(), 1);
    EXPECT_EQ(e.line(), 5);
    EXPECT_NE(std::string(e.what()).find("line 5"), std::string::npos);
  }
}

TEST(DependencyTree, SkipsMultiwordTokensAndEmptyNodes) {
  const std::string text = "1-2\tdon't\t_\t_\t_\t_\t_\t_\t_\t_\n" + line(1, "do", "0", "root") +
                           line(2, "n't", "1", "advmod") + "2.1\tx\t_\t_\t_\t_\t_\t_\t_\t_\n";
  const auto sentences = parse_conllu(text);
  ASSERT_EQ(sentences.size(), 1u);
  EXPECT_EQ(sentences[0].tree.size(), 2);
  EXPECT_EQ(sentences[0].notes.size(), 2u);
}

TEST(DependencyTree, EmptyDocument) {
  EXPECT_TRUE(parse_conllu("").empty());
  EXPECT_TRUE(parse_conllu("\n\n# just a comment\n\n").empty());
}

TEST(DependencyTree, Figure1FileMatchesWorkedExample) {
  const auto sentences = parse_conllu(read_file(RWEN_TEST_DATA_DIR "/figure1.conllu"));
  ASSERT_EQ(sentences.size(), 1u);
  EXPECT_EQ(sentences[0].sent_id, "fig1");
  const DependencyTree& t = sentences[0].tree;
  EXPECT_EQ(t.size(), 10);
  EXPECT_EQ(t.head(2), 3);
  EXPECT_EQ(t.head(3), 8);
  EXPECT_EQ(t.head(8), 0);
  EXPECT_EQ(t, figure1_tree());
}

TEST(Paths, RootPathWorkedExample) {
  const RelationPath p = root_path(figure1_tree(), 2);
  EXPECT_EQ(p.indexes, (std::vector<int>{2, 3, 8}));
  EXPECT_EQ(p.directions, (std::vector<Direction>{Direction::kSelf, Direction::kParent, Direction::kParent}));
  EXPECT_EQ(p.kind, PathKind::kRoot);
}

TEST(Paths, RootPathOfRootIsSingleton) {
  const RelationPath p = root_path(figure1_tree(), 8);
  EXPECT_EQ(p.indexes, (std::vector<int>{8}));
  EXPECT_EQ(p.directions, (std::vector<Direction>{Direction::kSelf}));
}

TEST(Paths, AdjacentPathWorkedExample) {
  const RelationPath p = adjacent_path(figure1_tree(), 2, PathKind::kPrev);
  EXPECT_EQ(p.indexes, (std::vector<int>{2, 3, 1}));
  EXPECT_EQ(p.directions, (std::vector<Direction>{Direction::kSelf, Direction::kParent, Direction::kChild}));
  EXPECT_EQ(p.kind, PathKind::kPrev);
}

TEST(Paths, DirectEdgeToPrevious) {
  const DependencyTree t({0, 1, 2}, {"root", "dep", "dep"});
  const RelationPath p = adjacent_path(t, 3, PathKind::kPrev);
  EXPECT_EQ(p.indexes, (std::vector<int>{3, 2}));
  EXPECT_EQ(p.directions, (std::vector<Direction>{Direction::kSelf, Direction::kParent}));
}

TEST(Paths, RangeErrors) {
  const DependencyTree t = figure1_tree();
  EXPECT_THROW(root_path(t, 0), TreeError);
  EXPECT_THROW(root_path(t, 11), TreeError);
  EXPECT_THROW(adjacent_path(t, 1, PathKind::kPrev), TreeError);
  EXPECT_THROW(adjacent_path(t, 10, PathKind::kNext), TreeError);
  EXPECT_THROW(adjacent_path(t, 3, PathKind::kRoot), std::invalid_argument);
}

TEST(Paths, SentencePathsSingleWord) {
  const DependencyTree t({0}, {"root"});
  for (const PathKind kind : {PathKind::kRoot, PathKind::kPrev, PathKind::kNext}) {
    const auto paths = sentence_paths(t, kind);
    ASSERT_EQ(paths.size(), 3u);
    for (int slot = 0; slot < 3; ++slot) {
      EXPECT_EQ(paths[static_cast<std::size_t>(slot)].indexes, std::vector<int>{slot});
      EXPECT_EQ(paths[static_cast<std::size_t>(slot)].directions, std::vector<Direction>{Direction::kSelf});
    }
    EXPECT_EQ(paths[0].kind, PathKind::kBoundary);
    EXPECT_EQ(paths[2].kind, PathKind::kBoundary);
  }
}

TEST(Paths, SentencePathsFigure1) {
  const auto roots = sentence_paths(figure1_tree(), PathKind::kRoot);
  ASSERT_EQ(roots.size(), 12u);
  EXPECT_EQ(roots[2].indexes, (std::vector<int>{2, 3, 8}));
  EXPECT_EQ(roots[11].indexes, std::vector<int>{11});
  const auto prev = sentence_paths(figure1_tree(), PathKind::kPrev);
  EXPECT_EQ(prev[1].indexes, std::vector<int>{1});
  EXPECT_EQ(prev[2].indexes, (std::vector<int>{2, 3, 1}));
  const auto next = sentence_paths(figure1_tree(), PathKind::kNext);
  EXPECT_EQ(next[10].indexes, std::vector<int>{10});
}

TEST(PathProperties, RandomTreesMatchOracles) {
  std::mt19937_64 rng(20240611);
  for (int trial = 0; trial < 1000; ++trial) {
    const int n = std::uniform_int_distribution<int>(1, 60)(rng);
    const DependencyTree t = random_tree(rng, n);
    const int height = t.height();
    for (int i = 1; i <= n; ++i) {
      const RelationPath up = root_path(t, i);
      ASSERT_EQ(up.indexes, head_iteration_path(t, i));
      ASSERT_EQ(up.indexes.back(), t.root());
      ASSERT_LE(static_cast<int>(up.size()), height + 1);
      for (std::size_t k = 1; k < up.size(); ++k) ASSERT_EQ(t.head(up.indexes[k - 1]), up.indexes[k]);
      if (i > 1) {
        const RelationPath p = adjacent_path(t, i, PathKind::kPrev);
        ASSERT_EQ(p.indexes, bfs_path(t, i, i - 1)) << "trial " << trial << " word " << i;
        ASSERT_LE(static_cast<int>(p.size()), 2 * height + 1);
        // Reverse of prev(i) is next(i-1) with parent/child swapped.
        const RelationPath q = adjacent_path(t, i - 1, PathKind::kNext);
        std::vector<int> reversed(p.indexes.rbegin(), p.indexes.rend());
        ASSERT_EQ(q.indexes, reversed);
        for (std::size_t y = 1; y < p.size(); ++y) {
          const Direction forward = p.directions[y];
          const Direction backward = q.directions[p.size() - y];
          ASSERT_NE(forward, Direction::kSelf);
          ASSERT_NE(forward, backward);
          ASSERT_NE(backward, Direction::kSelf);
        }
      }
      if (i < n) ASSERT_EQ(adjacent_path(t, i, PathKind::kNext).indexes, bfs_path(t, i, i + 1));
    }
  }
}

TEST(PathProperties, DirectionInvariant) {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 200; ++trial) {
    const DependencyTree t = random_tree(rng, std::uniform_int_distribution<int>(2, 30)(rng));
    for (const PathKind kind : {PathKind::kRoot, PathKind::kPrev, PathKind::kNext}) {
      for (const RelationPath& p : sentence_paths(t, kind)) {
        ASSERT_EQ(p.directions.size(), p.indexes.size());
        ASSERT_EQ(p.directions[0], Direction::kSelf);
        for (std::size_t y = 1; y < p.size(); ++y) {
          const int a = p.indexes[y - 1], b = p.indexes[y];
          if (p.directions[y] == Direction::kParent) {
            ASSERT_EQ(t.head(a), b);
          } else {
            ASSERT_EQ(p.directions[y], Direction::kChild);
            ASSERT_EQ(t.head(b), a);
          }
        }
      }
    }
  }
}

TEST(Conllu, SerializeRoundTrip) {
  std::mt19937_64 rng(99);
  std::vector<ConlluSentence> doc;
  for (int s = 0; s < 50; ++s) {
    ConlluSentence cs;
    cs.tree = random_tree(rng, std::uniform_int_distribution<int>(1, 25)(rng));
    for (int i = 1; i <= cs.tree.size(); ++i) cs.forms.push_back("w" + std::to_string(s) + "_" + std::to_string(i));
    cs.sent_id = "s" + std::to_string(s);
    doc.push_back(std::move(cs));
  }
  const auto back = parse_conllu(write_conllu(doc));
  ASSERT_EQ(back.size(), doc.size());
  for (std::size_t s = 0; s < doc.size(); ++s) {
    EXPECT_EQ(back[s].tree, doc[s].tree);
    EXPECT_EQ(back[s].forms, doc[s].forms);
    EXPECT_EQ(back[s].sent_id, doc[s].sent_id);
  }
}

}  // namespace
}  // namespace rwen::deptree
