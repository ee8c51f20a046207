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

#include <random>

#include "rwen/align/word_pooling.hpp"

namespace rwen::align {
namespace {

SubwordSegmentation random_segmentation(std::mt19937_64& rng, int words) {
  SubwordSegmentation seg;
  int next = 1;
  for (int i = 0; i < words; ++i) {
    const int len = std::uniform_int_distribution<int>(1, 3)(rng);
    seg.spans.push_back({next, next + len});
    next += len;
  }
  seg.subword_count = next - 1;
  return seg;
}

TEST(WordPooling, TwoSubwordWordIsTheirMean) {
  // [CLS] the quick ly [SEP] -> words "the", "quickly"
  MatrixD h(2, 5);
  h << 1, 2, 3, 5, 9,
       0, 4, 8, -2, 7;
  const SubwordSegmentation seg{{{1, 2}, {2, 4}}, 3};
  const MatrixD w = word_average_pool(h, seg);
  ASSERT_EQ(w.cols(), 4);
  EXPECT_EQ(w.col(0), h.col(0));
  EXPECT_EQ(w.col(1), h.col(1));
  EXPECT_DOUBLE_EQ(w(0, 2), 4.0);
  EXPECT_DOUBLE_EQ(w(1, 2), 3.0);
  EXPECT_EQ(w.col(3), h.col(4));
}

TEST(WordPooling, IdentitySegmentationCopies) {
  const MatrixF h = MatrixF::Random(6, 9);
  EXPECT_EQ(word_average_pool(h, SubwordSegmentation::identity(7)), h);
}

TEST(WordPooling, EqualSubwordsGiveThatVector) {
  MatrixF h = MatrixF::Random(4, 6);
  const Eigen::VectorXf v = Eigen::VectorXf::Random(4);
  for (int c = 1; c <= 4; ++c) h.col(c) = v;
  const MatrixF w = word_average_pool(h, SubwordSegmentation{{{1, 5}}, 4});
  EXPECT_TRUE(w.col(1).isApprox(v, 1e-6f));
}

TEST(WordPooling, RejectsBadSegmentations) {
  const MatrixF h = MatrixF::Zero(2, 6);
  EXPECT_THROW(word_average_pool(h, SubwordSegmentation{{{1, 3}, {4, 5}}, 4}), AlignError);  // gap
  EXPECT_THROW(word_average_pool(h, SubwordSegmentation{{{1, 3}, {2, 5}}, 4}), AlignError);  // overlap
  EXPECT_THROW(word_average_pool(h, SubwordSegmentation{{{1, 3}, {3, 3}}, 4}), AlignError);  // empty
  EXPECT_THROW(word_average_pool(h, SubwordSegmentation{{{0, 3}, {3, 5}}, 4}), AlignError);  // [CLS] inside
  EXPECT_THROW(word_average_pool(h, SubwordSegmentation{{{1, 3}, {3, 6}}, 4}), AlignError);  // [SEP] inside
  EXPECT_THROW(word_average_pool(h, SubwordSegmentation{{{1, 3}}, 4}), AlignError);          // short cover
  EXPECT_THROW(word_average_pool(h, SubwordSegmentation{{{1, 3}, {3, 4}}, 3}), AlignError);  // column count
  MatrixF bad = MatrixF::Zero(2, 6);
  bad(1, 2) = std::numeric_limits<float>::infinity();
  EXPECT_THROW(word_average_pool(bad, SubwordSegmentation{{{1, 3}, {3, 5}}, 4}), AlignError);
}

TEST(WordPoolingProperties, ConvexHullLinearityPermutation) {
  std::mt19937_64 rng(42);
  std::normal_distribution<double> normal;
  for (int trial = 0; trial < 200; ++trial) {
    const int words = std::uniform_int_distribution<int>(1, 12)(rng);
    const SubwordSegmentation seg = random_segmentation(rng, words);
    const int m = seg.subword_count;
    MatrixD a(5, m + 2), b(5, m + 2);
    for (Eigen::Index i = 0; i < a.size(); ++i) {
      a.data()[i] = normal(rng);
      b.data()[i] = normal(rng);
    }
    const MatrixD pa = word_average_pool(a, seg);
    const MatrixD pb = word_average_pool(b, seg);

    for (int i = 0; i < words; ++i) {
      const Span s = seg.spans[static_cast<std::size_t>(i)];
      const auto block = a.middleCols(s.begin, s.size());
      for (Eigen::Index r = 0; r < 5; ++r) {
        ASSERT_GE(pa(r, i + 1), block.row(r).minCoeff() - 1e-12);
        ASSERT_LE(pa(r, i + 1), block.row(r).maxCoeff() + 1e-12);
      }
    }
    ASSERT_TRUE(word_average_pool(MatrixD(a + b), seg).isApprox(pa + pb, 1e-12));

    // Reverse word order, moving subword columns with their words.
    SubwordSegmentation rev;
    rev.subword_count = m;
    MatrixD ar(5, m + 2);
    ar.col(0) = a.col(0);
    ar.col(m + 1) = a.col(m + 1);
    int next = 1;
    for (int i = words - 1; i >= 0; --i) {
      const Span s = seg.spans[static_cast<std::size_t>(i)];
      ar.middleCols(next, s.size()) = a.middleCols(s.begin, s.size());
      rev.spans.push_back({next, next + s.size()});
      next += s.size();
    }
    const MatrixD pr = word_average_pool(ar, rev);
    for (int i = 0; i < words; ++i) ASSERT_EQ(pr.col(words - i), pa.col(i + 1));
  }
}

}  // namespace
}  // namespace rwen::align
