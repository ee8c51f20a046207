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

#include "rwen/align/word_pooling.hpp"

namespace rwen::align {

SubwordSegmentation SubwordSegmentation::identity(int words) {
  SubwordSegmentation seg;
  seg.subword_count = words;
  seg.spans.reserve(static_cast<std::size_t>(words));
  for (int i = 1; i <= words; ++i) seg.spans.push_back({i, i + 1});
  return seg;
}

void validate(const SubwordSegmentation& seg) {
  if (seg.subword_count < 0) throw AlignError("negative subword count");
  int expected = 1;
  for (std::size_t i = 0; i < seg.spans.size(); ++i) {
    const Span s = seg.spans[i];
    const std::string where = "span of word " + std::to_string(i + 1);
    if (s.begin < 1 || s.end > seg.subword_count + 1) {
      throw AlignError(where + " [" + std::to_string(s.begin) + ", " + std::to_string(s.end) + ") outside [1, " +
                       std::to_string(seg.subword_count + 1) + ")");
    }
    if (s.end <= s.begin) throw AlignError(where + " is empty");
    if (s.begin > expected) throw AlignError(where + " leaves a gap before subword " + std::to_string(s.begin));
    if (s.begin < expected) throw AlignError(where + " overlaps the previous span");
    expected = s.end;
  }
  if (expected != seg.subword_count + 1) {
    throw AlignError("spans cover [1, " + std::to_string(expected) + ") but " + std::to_string(seg.subword_count) +
                     " subwords are declared");
  }
}

}  // namespace rwen::align
