# Copyright 2026 The rwen-tts Authors. All Rights Reserved.
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#     http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.
# ==============================================================================

"""Character-offset alignment between parser words and encoder subwords."""

from __future__ import annotations


class AlignmentError(ValueError):
    pass


def word_offsets(text: str, words: list[str]) -> list[tuple[int, int]]:
    """Locates each word in order; whitespace between words is skipped."""
    out, at = [], 0
    for w in words:
        start = text.find(w, at)
        if start < 0 or text[at:start].strip():
            raise AlignmentError(f"word {w!r} not found at offset {at}")
        out.append((start, start + len(w)))
        at = start + len(w)
    return out


def subword_spans(word_chars: list[tuple[int, int]], subword_chars: list[tuple[int, int]]) -> list[tuple[int, int]]:
    """Half-open subword column ranges per word.

    `subword_chars` covers interior subwords only, so subword k maps to column
    k + 1. Every subword must sit inside one word and every word must receive
    at least one subword; anything else raises AlignmentError.
    """
    owner = []
    w = 0
    for k, (b, e) in enumerate(subword_chars):
        while w < len(word_chars) and b >= word_chars[w][1]:
            w += 1
        if w == len(word_chars) or not (word_chars[w][0] <= b and e <= word_chars[w][1]):
            raise AlignmentError(f"subword {k} at chars [{b}, {e}) crosses a word boundary")
        owner.append(w)
    spans = []
    for i in range(len(word_chars)):
        cols = [k + 1 for k, o in enumerate(owner) if o == i]
        if not cols:
            raise AlignmentError(f"word {i + 1} received no subwords")
        spans.append((cols[0], cols[-1] + 1))
    return spans
