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

"""Replays the featstore load-time invariants on an exported directory.

Usage: python -m rwen_dataprep.validate DIR [--d-h N]
Exit status is 0 when every record passes, 1 otherwise.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from dataclasses import dataclass

import numpy as np

from . import tensorfile


@dataclass
class Problem:
    where: str  # sentence id, or "line N" before the id is known
    field: str
    message: str

    def __str__(self) -> str:
        return f"sentence '{self.where}', field '{self.field}': {self.message}"


class _Fail(Exception):
    def __init__(self, field: str, message: str):
        super().__init__(message)
        self.field = field
        self.message = message


def _int_list(value, field: str) -> list[int]:
    if not isinstance(value, list) or not all(isinstance(v, int) and not isinstance(v, bool) for v in value):
        raise _Fail(field, "expected a list of integers")
    return value


def check_tree(head: list[int], rel: list, n: int) -> None:
    if len(head) != n:
        raise _Fail("head", f"{len(head)} heads for {n} words")
    if not isinstance(rel, list) or len(rel) != n or not all(isinstance(r, str) and r for r in rel):
        raise _Fail("rel", f"expected {n} non-empty relation strings")
    roots = [i + 1 for i, h in enumerate(head) if h == 0]
    if len(roots) != 1:
        raise _Fail("head", f"expected exactly one root, found {len(roots)}")
    for i, h in enumerate(head, start=1):
        if h < 0 or h > n:
            raise _Fail("head", f"word {i} has head {h} outside 0..{n}")
        if h == i:
            raise _Fail("head", f"word {i} is its own head")
    for i in range(1, n + 1):
        seen, j = set(), i
        while j != 0:
            if j in seen:
                raise _Fail("head", f"cycle reached from word {i}")
            seen.add(j)
            j = head[j - 1]


def check_spans(spans, subwords, n: int) -> None:
    if not isinstance(subwords, int) or subwords < 1:
        raise _Fail("subwords", "must be a positive integer")
    if not isinstance(spans, list) or len(spans) != n:
        raise _Fail("spans", f"expected {n} spans")
    expect = 1
    for k, sp in enumerate(spans, start=1):
        if not (isinstance(sp, list) and len(sp) == 2 and all(isinstance(v, int) for v in sp)):
            raise _Fail("spans", f"span {k} must be [begin, end]")
        b, e = sp
        if b != expect:
            raise _Fail("spans", f"span {k} starts at {b}, expected {expect} (gap or overlap)")
        if e <= b:
            raise _Fail("spans", f"span {k} is empty")
        expect = e
    if expect != subwords + 1:
        raise _Fail("spans", f"spans end at {expect}, expected {subwords + 1}")


def _sidecar(directory: str, rel_path, field: str) -> np.ndarray:
    if not isinstance(rel_path, str):
        raise _Fail(field, "expected a tensor file path")
    path = os.path.join(directory, rel_path)
    if not os.path.exists(path):
        raise _Fail(field, f"dangling tensor reference {path}")
    try:
        return tensorfile.read(path)
    except tensorfile.FormatError as e:
        raise _Fail(field, str(e)) from None


def _finite(a: np.ndarray) -> bool:
    return bool(np.isfinite(a).all())


def check_record(rec: dict, directory: str, d_h: int | None = None) -> None:
    words = rec.get("words")
    if not isinstance(words, list) or not words or not all(isinstance(w, str) for w in words):
        raise _Fail("words", "expected a non-empty list of strings")
    n = len(words)
    check_tree(_int_list(rec.get("head"), "head"), rec.get("rel"), n)
    check_spans(rec.get("spans"), rec.get("subwords"), n)
    m = rec["subwords"]

    emb = rec.get("embeddings")
    if not isinstance(emb, dict):
        raise _Fail("embeddings", "missing")
    if "file" in emb:
        e = _sidecar(directory, emb["file"], "embeddings")
        if e.ndim != 2 or e.shape[1] != m + 2 or e.shape[0] < 1:
            raise _Fail("embeddings", f"shape {e.shape}, expected (d_H, {m + 2})")
        if not _finite(e):
            raise _Fail("embeddings", "non-finite value")
        rows = e.shape[0]
    elif emb.get("provider") == "pseudo":
        rows = emb.get("dim")
        if not isinstance(rows, int) or rows < 1:
            raise _Fail("embeddings", "dim must be >= 1")
        if not isinstance(emb.get("seed"), int) or emb["seed"] < 0:
            raise _Fail("embeddings", "seed must be a non-negative integer")
    else:
        raise _Fail("embeddings", "expected {\"file\": ...} or {\"provider\": \"pseudo\", ...}")
    if d_h is not None and rows != d_h:
        raise _Fail("embeddings", f"d_H is {rows}, declared encoder size is {d_h}")

    phonemes = rec.get("phonemes")
    if not isinstance(phonemes, list) or len(phonemes) != n:
        raise _Fail("phonemes", f"expected {n} per-word lists")
    for w in phonemes:
        if any(p < 0 for p in _int_list(w, "phonemes")):
            raise _Fail("phonemes", "negative phoneme id")
    length = sum(len(w) for w in phonemes)

    targets = rec.get("targets")
    if targets is None:
        return
    durations = _int_list(targets.get("durations"), "targets.durations")
    if len(durations) != length:
        raise _Fail("targets.durations", f"{len(durations)} durations for {length} phonemes")
    if any(d < 0 for d in durations):
        raise _Fail("targets.durations", "negative duration")
    for name in ("pitch", "energy"):
        v = _sidecar(directory, targets.get(name), f"targets.{name}")
        if v.size != length:
            raise _Fail(f"targets.{name}", f"{v.size} values for {length} phonemes")
        if not _finite(v):
            raise _Fail(f"targets.{name}", "non-finite value")
    mel = _sidecar(directory, targets.get("mel"), "targets.mel")
    frames = sum(durations)
    if mel.ndim != 2 or mel.shape[1] != frames:
        raise _Fail("targets.mel", f"shape {mel.shape}, expected (n_mels, {frames})")
    if not _finite(mel):
        raise _Fail("targets.mel", "non-finite value")


def validate_dir(directory: str, d_h: int | None = None, manifest: str = "manifest.jsonl") -> list[Problem]:
    """Every problem found, one per failing record, in file order."""
    path = os.path.join(directory, manifest)
    problems: list[Problem] = []
    seen: set[str] = set()
    with open(path, encoding="utf-8") as f:
        for no, line in enumerate(f, start=1):
            if not line.strip():
                continue
            where = f"line {no}"
            try:
                rec = json.loads(line)
            except json.JSONDecodeError as e:
                problems.append(Problem(where, "record", str(e)))
                continue
            if not isinstance(rec, dict):
                problems.append(Problem(where, "record", "not a JSON object"))
                continue
            if not isinstance(rec.get("id"), str) or not rec["id"]:
                problems.append(Problem(where, "id", "missing or empty id"))
                continue
            where = rec["id"]
            if where in seen:
                problems.append(Problem(where, "id", "duplicate sentence id"))
                continue
            seen.add(where)
            try:
                check_record(rec, directory, d_h)
            except _Fail as e:
                problems.append(Problem(where, e.field, e.message))
    return problems


def main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("dir")
    parser.add_argument("--d-h", type=int, default=None, help="declared encoder width")
    args = parser.parse_args(argv)
    try:
        problems = validate_dir(args.dir, args.d_h)
    except OSError as e:
        print(f"error: {e}", file=sys.stderr)
        return 1
    for p in problems:
        print(p, file=sys.stderr)
    print(f"{'FAIL' if problems else 'PASS'}: {len(problems)} problem(s)")
    return 1 if problems else 0


if __name__ == "__main__":
    sys.exit(main())
