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

#include "rwen/deptree/conllu.hpp"

#include <charconv>
#include <fstream>
#include <optional>
#include <sstream>

namespace rwen::deptree {

namespace {

std::vector<std::string_view> split_tabs(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t tab = line.find('\t', start);
    if (tab == std::string_view::npos) {
      out.push_back(line.substr(start));
      return out;
    }
    out.push_back(line.substr(start, tab - start));
    start = tab + 1;
  }
}

std::optional<int> parse_int(std::string_view s) {
  int value = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
  if (ec != std::errc() || ptr != s.data() + s.size() || s.empty()) return std::nullopt;
  return value;
}

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t");
  return std::string(s.substr(b, e - b + 1));
}

struct PendingSentence {
  int first_line = 0;
  std::string sent_id;
  std::vector<std::string> forms;
  std::vector<WordIndex> heads;
  std::vector<std::string> rels;
  std::vector<int> lines;
  std::vector<std::string> notes;

  bool empty() const { return forms.empty(); }
};

}  // namespace

ConlluError::ConlluError(Kind kind, int sentence_index, int line, const std::string& detail)
    : TreeError(kind, "sentence " + std::to_string(sentence_index) + ", line " + std::to_string(line) + ": " +
                          to_string(kind) + ": " + detail),
      sentence_index_(sentence_index),
      line_(line) {}

std::vector<ConlluSentence> parse_conllu(std::string_view text) {
  std::vector<ConlluSentence> out;
  PendingSentence cur;
  int line_no = 0;

  auto flush = [&]() {
    if (cur.empty()) {
      cur = PendingSentence{};
      return;
    }
    const int index = static_cast<int>(out.size());
    const int n = static_cast<int>(cur.heads.size());
    for (int i = 0; i < n; ++i) {
      const int h = cur.heads[static_cast<std::size_t>(i)];
      if (h < 0 || h > n) {
        throw ConlluError(TreeError::Kind::kBadHead, index, cur.lines[static_cast<std::size_t>(i)],
                          "head " + std::to_string(h) + " outside [0, " + std::to_string(n) + "]");
      }
    }
    try {
      ConlluSentence s;
      s.sent_id = cur.sent_id;
      s.forms = std::move(cur.forms);
      s.tree = DependencyTree(std::move(cur.heads), std::move(cur.rels));
      s.notes = std::move(cur.notes);
      out.push_back(std::move(s));
    } catch (const TreeError& e) {
      throw ConlluError(e.kind(), index, cur.first_line, e.what());
    }
    cur = PendingSentence{};
  };

  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t nl = text.find('\n', pos);
    if (nl == std::string_view::npos) nl = text.size();
    std::string_view line = text.substr(pos, nl - pos);
    pos = nl + 1;
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);

    if (line.find_first_not_of(" \t") == std::string_view::npos) {
      flush();
      if (nl == text.size()) break;
      continue;
    }
    if (line.front() == '#') {
      const std::string body = trim(line.substr(1));
      constexpr std::string_view kSentId = "sent_id";
      if (body.rfind(kSentId, 0) == 0) {
        const auto eq = body.find('=');
        if (eq != std::string::npos) cur.sent_id = trim(std::string_view(body).substr(eq + 1));
      }
      if (nl == text.size()) break;
      continue;
    }

    const int index = static_cast<int>(out.size());
    const auto cols = split_tabs(line);
    if (cols.size() != 10) {
      throw ConlluError(TreeError::Kind::kSyntax, index, line_no,
                        "expected 10 tab-separated columns, found " + std::to_string(cols.size()));
    }
    if (cur.empty() && cur.notes.empty()) cur.first_line = line_no;
    const std::string_view id = cols[0];
    if (id.find('-') != std::string_view::npos || id.find('.') != std::string_view::npos) {
      cur.notes.push_back("line " + std::to_string(line_no) + ": skipped token " + std::string(id));
      if (nl == text.size()) break;
      continue;
    }
    const auto id_value = parse_int(id);
    if (!id_value) {
      throw ConlluError(TreeError::Kind::kSyntax, index, line_no, "non-integer ID '" + std::string(id) + "'");
    }
    const int expected = static_cast<int>(cur.forms.size()) + 1;
    if (*id_value != expected) {
      const auto kind = (*id_value >= 1 && *id_value < expected) ? TreeError::Kind::kDuplicateId : TreeError::Kind::kSyntax;
      throw ConlluError(kind, index, line_no,
                        "ID " + std::to_string(*id_value) + " where " + std::to_string(expected) + " was expected");
    }
    const auto head = parse_int(cols[6]);
    if (!head) {
      throw ConlluError(TreeError::Kind::kBadHead, index, line_no, "non-integer HEAD '" + std::string(cols[6]) + "'");
    }
    if (cur.forms.empty()) cur.first_line = line_no;
    cur.forms.emplace_back(cols[1]);
    cur.heads.push_back(*head);
    cur.rels.emplace_back(cols[7]);
    cur.lines.push_back(line_no);
    if (nl == text.size()) break;
  }
  flush();
  return out;
}

std::vector<ConlluSentence> read_conllu_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_conllu(ss.str());
}

std::string write_conllu(const std::vector<ConlluSentence>& sentences) {
  std::string out;
  for (const auto& s : sentences) {
    if (!s.sent_id.empty()) out += "# sent_id = " + s.sent_id + "\n";
    for (int i = 1; i <= s.tree.size(); ++i) {
      out += std::to_string(i);
      out += '\t';
      out += s.forms.at(static_cast<std::size_t>(i - 1));
      out += "\t_\t_\t_\t_\t";
      out += std::to_string(s.tree.head(i));
      out += '\t';
      out += s.tree.rel(i);
      out += "\t_\t_\n";
    }
    out += '\n';
  }
  return out;
}

}  // namespace rwen::deptree
