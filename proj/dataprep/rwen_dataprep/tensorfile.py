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

"""TensorFile codec: b"RWT1" | u32 ndim | u32 dims[ndim] | f32 payload, little-endian, row-major."""

from __future__ import annotations

import os
import struct
import tempfile

import numpy as np

MAGIC = b"RWT1"


class FormatError(ValueError):
    pass


def encode(array: np.ndarray) -> bytes:
    a = np.ascontiguousarray(array, dtype="<f4")
    header = MAGIC + struct.pack("<I", a.ndim) + struct.pack(f"<{a.ndim}I", *a.shape)
    return header + a.tobytes(order="C")


def decode(data: bytes, source: str = "<memory>") -> np.ndarray:
    if len(data) < 8 or data[:4] != MAGIC:
        raise FormatError(f"{source}: missing RWT1 magic")
    (ndim,) = struct.unpack_from("<I", data, 4)
    at = 8 + 4 * ndim
    if len(data) < at:
        raise FormatError(f"{source}: truncated header ({ndim} dims)")
    dims = struct.unpack_from(f"<{ndim}I", data, 8)
    count = int(np.prod(dims, dtype=np.int64)) if ndim else 1
    if len(data) - at != 4 * count:
        raise FormatError(f"{source}: payload is {len(data) - at} bytes, dims require {4 * count}")
    return np.frombuffer(data, dtype="<f4", offset=at, count=count).reshape(dims).copy()


def write(path: str | os.PathLike, array: np.ndarray) -> None:
    """Writes to a temporary sibling, then renames into place."""
    path = os.fspath(path)
    directory = os.path.dirname(path) or "."
    os.makedirs(directory, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".tmp-", suffix=".rwt")
    try:
        with os.fdopen(fd, "wb") as f:
            f.write(encode(array))
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def read(path: str | os.PathLike) -> np.ndarray:
    with open(path, "rb") as f:
        return decode(f.read(), os.fspath(path))
