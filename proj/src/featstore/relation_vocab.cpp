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

#include "rwen/featstore/relation_vocab.hpp"

#include <algorithm>

namespace rwen::featstore {

int relation_id(std::string_view tag) {
  const auto colon = tag.find(':');
  if (colon != std::string_view::npos) tag = tag.substr(0, colon);
  const auto it = std::find(kUniversalRelations.begin(), kUniversalRelations.end(), tag);
  if (it == kUniversalRelations.end()) return kUnknownRelation;
  return static_cast<int>(it - kUniversalRelations.begin());
}

std::string_view relation_name(int id) {
  if (id >= 0 && id < static_cast<int>(kUniversalRelations.size())) return kUniversalRelations[static_cast<std::size_t>(id)];
  if (id == kUnknownRelation) return "unk";
  if (id == kBoundaryRelation) return "boundary";
  return "?";
}

}  // namespace rwen::featstore
