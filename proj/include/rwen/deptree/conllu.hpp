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

#include <string>
#include <string_view>
#include <vector>

#include "rwen/deptree/dependency_tree.hpp"

namespace rwen::deptree {

// Parse failure inside a CoNLL-U document. `sentence_index` is 0-based,
// `line` is the 1-based document line the problem was found on.
class ConlluError : public TreeError {
 public:
  ConlluError(Kind kind, int sentence_index, int line, const std::string& detail);

  int sentence_index() const { return sentence_index_; }
  int line() const { return line_; }

 private:
  int sentence_index_;
  int line_;
};

struct ConlluSentence {
  std::string sent_id;  // from "# sent_id = ..." when present
  std::vector<std::string> forms;
  DependencyTree tree;
  // Lines that were skipped (multiword tokens, empty nodes).
  std::vector<std::string> notes;
};

// Reads ID, FORM, HEAD and DEPREL from each word line. Multiword-token
// ranges ("3-4") and empty nodes ("5.1") are skipped with a note.
std::vector<ConlluSentence> parse_conllu(std::string_view text);

std::vector<ConlluSentence> read_conllu_file(const std::string& path);

// Emits the 10-column form with unread columns as "_".
std::string write_conllu(const std::vector<ConlluSentence>& sentences);

}  // namespace rwen::deptree
