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

#include <array>
#include <string_view>

namespace rwen::featstore {

// The 37 Universal Dependencies relations, then "unk" and the reserved tag
// for the [CLS]/[SEP] slots.
inline constexpr std::array<std::string_view, 37> kUniversalRelations = {
    "acl",   "advcl",    "advmod",     "amod",     "appos",  "aux",   "case",   "cc",      "ccomp",     "clf",
    "compound", "conj",  "cop",        "csubj",    "dep",    "det",   "discourse", "dislocated", "expl", "fixed",
    "flat",  "goeswith", "iobj",       "list",     "mark",   "nmod",  "nsubj",  "nummod",  "obj",       "obl",
    "orphan", "parataxis", "punct",    "reparandum", "root", "vocative", "xcomp"};

inline constexpr int kUnknownRelation = 37;
inline constexpr int kBoundaryRelation = 38;
inline constexpr int kRelationVocabSize = 39;

// Subtypes are dropped at the first ':' ("acl:relcl" -> "acl"); anything
// outside the universal list maps to kUnknownRelation.
int relation_id(std::string_view tag);
std::string_view relation_name(int id);

}  // namespace rwen::featstore
