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

"""Writers and validators for the rwen manifest + TensorFile interchange format."""

from .manifest import Record, read_manifest, write_manifest
from .tensorfile import FormatError, decode, encode, read, write
from .validate import validate_dir

__all__ = [
    "FormatError",
    "Record",
    "decode",
    "encode",
    "read",
    "read_manifest",
    "validate_dir",
    "write",
    "write_manifest",
]
