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

#include <stdexcept>
#include <string>
#include <vector>

#include "rwen/nn/matrix.hpp"

namespace rwen::align {

class AlignError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Half-open subword column range [begin, end) for one word. Interior subword
// columns are numbered 1..m; column 0 is [CLS] and m+1 is [SEP].
struct Span {
  int begin = 0;
  int end = 0;

  int size() const { return end - begin; }
  bool operator==(const Span&) const = default;
};

struct SubwordSegmentation {
  std::vector<Span> spans;  // one per word, in word order
  int subword_count = 0;    // m

  int word_count() const { return static_cast<int>(spans.size()); }
  bool operator==(const SubwordSegmentation&) const = default;

  // One subword per word.
  static SubwordSegmentation identity(int words);
};

// Throws AlignError if the spans are not sorted, contiguous, non-empty and
// covering exactly [1, m+1).
void validate(const SubwordSegmentation& seg);

// Averages the subword columns of each word. Output has n+2 columns; the
// [CLS]/[SEP] columns are copied from the input unchanged. Means are
// accumulated in double and then cast to T.
template <typename T>
Matrix<T> word_average_pool(const Matrix<T>& subword, const SubwordSegmentation& seg) {
  validate(seg);
  const int m = seg.subword_count;
  if (subword.cols() != m + 2) {
    throw AlignError("subword matrix has " + std::to_string(subword.cols()) + " columns, segmentation expects " +
                     std::to_string(m + 2));
  }
  if (!all_finite(subword)) throw AlignError("subword matrix contains non-finite values");

  const int n = seg.word_count();
  const auto rows = subword.rows();
  Matrix<T> out(rows, n + 2);
  out.col(0) = subword.col(0);
  out.col(n + 1) = subword.col(m + 1);
  for (int i = 0; i < n; ++i) {
    const Span span = seg.spans[static_cast<std::size_t>(i)];
    for (Eigen::Index r = 0; r < rows; ++r) {
      double acc = 0.0;
      for (int j = span.begin; j < span.end; ++j) acc += static_cast<double>(subword(r, j));
      out(r, i + 1) = static_cast<T>(acc / span.size());
    }
  }
  return out;
}

}  // namespace rwen::align
