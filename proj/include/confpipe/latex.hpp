/*
    Licensed under the Apache License, Version 2.0 (the "License");
    you may not use this file except in compliance with the License.
    You may obtain a copy of the License at

        https://www.apache.org/licenses/LICENSE-2.0

    Unless required by applicable law or agreed to in writing, software
    distributed under the License is distributed on an "AS IS" BASIS,
    WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
    See the License for the specific language governing permissions and
    limitations under the License.
*/

#pragma once

// Structure-level LaTeX scanner: sections, citations, bibliography entries,
// figure/table environments, red revision markup. Source-level only — no
// rendering, no macro expansion.

#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace confpipe::latex {

struct Section {
  std::string heading;    // as written
  std::string canonical;  // lowercased, alias-resolved
  size_t cmd_start = 0;   // position of the \section token
  size_t body_start = 0;  // first char after the heading group
  size_t body_end = 0;    // start of the next section (or end-of-doc)
};

struct Figure {
  size_t start = 0, end = 0;
  std::string label;    // \label inside the environment, if any
  std::string lineage;  // value of a %lineage: comment, "" when untagged
  std::string section;  // canonical containing section
};

struct RedSpan {
  size_t start = 0, end = 0;  // full \textcolor{red}{...} group
  std::string content;
  std::string section;  // canonical containing section
};

struct Doc {
  std::string source;
  bool has_documentclass = false;
  bool has_begin_document = false;
  bool has_end_document = false;
  bool has_abstract = false;
  bool has_bibliography = false;  // thebibliography env or \bibliography cmd
  bool braces_balanced = true;
  std::string title;
  std::vector<std::string> authors;  // \author{...} split on \and
  std::string affiliation;
  std::vector<Section> sections;
  std::vector<std::string> cite_keys_in_order;  // with duplicates
  std::map<std::string, std::string> bib_entries;  // key -> entry body
  std::vector<Figure> figures;
  int table_count = 0;
  std::vector<RedSpan> red_spans;

  const Section* find_section(const std::string& canonical) const;
  std::string section_body(const Section& s) const;
  std::vector<std::string> section_skeleton() const;  // canonical, in order
  std::map<std::string, int> cite_key_counts() const;
};

Doc scan(const std::string& source);

// Alias mapping for section headings: "Methods" -> "methodology",
// "Bibliography" -> "references". "Conclusion" stays its own section.
std::string canonical_section(const std::string& heading);

// Removes every \textcolor{red}{...} group together with its content.
std::string strip_red_markup(const std::string& source);

// Content of the brace group whose '{' is at `open_pos`, and the position
// one past the matching '}'. nullopt when unbalanced.
std::optional<std::pair<std::string, size_t>> brace_group(
    const std::string& source, size_t open_pos);

}  // namespace confpipe::latex
