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

"""Line-delimited manifest records with sidecar TensorFiles under <dir>/tensors/."""

from __future__ import annotations

import json
import os
import re
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from . import tensorfile


@dataclass
class Record:
    id: str
    words: list[str]
    head: list[int]  # 1-based heads, 0 marks the root
    rel: list[str]
    spans: list[tuple[int, int]]  # half-open subword columns per word, interior columns are 1..m
    subwords: int
    embeddings: Optional[np.ndarray] = None  # d_H x (m + 2); None with pseudo_dim set
    pseudo_dim: Optional[int] = None
    pseudo_seed: int = 0
    phonemes: list[list[int]] = field(default_factory=list)
    durations: Optional[list[int]] = None
    pitch: Optional[np.ndarray] = None
    energy: Optional[np.ndarray] = None
    mel: Optional[np.ndarray] = None  # n_mels x sum(durations)


def _sanitize(sentence_id: str) -> str:
    return re.sub(r"[^A-Za-z0-9._-]", "_", sentence_id)


def _to_json(r: Record, directory: str, index: int) -> dict:
    stem = f"tensors/{index}_{_sanitize(r.id)}"
    out = {
        "id": r.id,
        "words": r.words,
        "head": r.head,
        "rel": r.rel,
        "spans": [list(s) for s in r.spans],
        "subwords": r.subwords,
    }
    if r.embeddings is not None:
        tensorfile.write(os.path.join(directory, stem + ".emb.rwt"), r.embeddings)
        out["embeddings"] = {"file": stem + ".emb.rwt"}
    elif r.pseudo_dim is not None:
        out["embeddings"] = {"provider": "pseudo", "dim": r.pseudo_dim, "seed": r.pseudo_seed}
    else:
        raise ValueError(f"sentence {r.id!r}: needs embeddings or a pseudo dim")
    out["phonemes"] = r.phonemes or [[] for _ in r.words]
    if r.durations is not None:
        targets = {"durations": r.durations}
        for name in ("pitch", "energy"):
            values = np.asarray(getattr(r, name), dtype=np.float32).reshape(1, -1)
            tensorfile.write(os.path.join(directory, f"{stem}.{name}.rwt"), values)
            targets[name] = f"{stem}.{name}.rwt"
        tensorfile.write(os.path.join(directory, stem + ".mel.rwt"), r.mel)
        targets["mel"] = stem + ".mel.rwt"
        out["targets"] = targets
    return out


def write_manifest(path: str | os.PathLike, records: list[Record]) -> None:
    path = os.fspath(path)
    directory = os.path.dirname(path) or "."
    os.makedirs(os.path.join(directory, "tensors"), exist_ok=True)
    # Same byte layout as the C++ writer: sorted keys, no whitespace, raw UTF-8.
    lines = [
        json.dumps(_to_json(r, directory, i), sort_keys=True, separators=(",", ":"), ensure_ascii=False)
        for i, r in enumerate(records)
    ]
    tmp = path + ".tmp"
    with open(tmp, "w", encoding="utf-8") as f:
        f.write("".join(line + "\n" for line in lines))
    os.replace(tmp, path)


def read_manifest(path: str | os.PathLike) -> list[dict]:
    """Raw records with their 1-based line numbers under "_line"; no validation."""
    out = []
    with open(path, encoding="utf-8") as f:
        for no, line in enumerate(f, start=1):
            if not line.strip():
                continue
            rec = json.loads(line)
            if isinstance(rec, dict):
                rec["_line"] = no
            out.append(rec)
    return out
