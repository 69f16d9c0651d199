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

#include "confpipe/latex.hpp"

#include <algorithm>

#include "confpipe/strings.hpp"

namespace confpipe::latex {

namespace {

// Positions of every occurrence of `needle` in `s`.
std::vector<size_t> find_all(const std::string& s, const std::string& needle) {
  std::vector<size_t> out;
  size_t pos = 0;
  while ((pos = s.find(needle, pos)) != std::string::npos) {
    out.push_back(pos);
    pos += needle.size();
  }
  return out;
}

bool is_escaped(const std::string& s, size_t pos) {
  // Odd number of immediately preceding backslashes.
  size_t n = 0;
  while (pos > n && s[pos - n - 1] == '\\') ++n;
  return (n % 2) == 1;
}

}  // namespace

std::optional<std::pair<std::string, size_t>> brace_group(
    const std::string& source, size_t open_pos) {
  if (open_pos >= source.size() || source[open_pos] != '{') return std::nullopt;
  int depth = 0;
  for (size_t i = open_pos; i < source.size(); ++i) {
    char c = source[i];
    if ((c == '{' || c == '}') && is_escaped(source, i)) continue;
    if (c == '{') ++depth;
    if (c == '}') {
      --depth;
      if (depth == 0) {
        return std::make_pair(source.substr(open_pos + 1, i - open_pos - 1),
                              i + 1);
      }
    }
  }
  return std::nullopt;
}

std::string canonical_section(const std::string& heading) {
  std::string h = to_lower(normalize_ws(heading));
  if (h == "methods" || h == "materials and methods") return "methodology";
  if (h == "bibliography") return "references";
  if (h == "related work") return "related works";
  return h;
}

namespace {

// Extracts the group argument of command occurrences like \title{...}.
std::optional<std::string> command_arg(const std::string& src,
                                       const std::string& cmd) {
  auto positions = find_all(src, cmd + "{");
  for (size_t pos : positions) {
    if (is_escaped(src, pos)) continue;
    auto grp = brace_group(src, pos + cmd.size());
    if (grp) return grp->first;
  }
  return std::nullopt;
}

std::string containing_section(const std::vector<Section>& sections,
                               size_t pos) {
  std::string out;
  for (const auto& s : sections) {
    if (s.body_start <= pos && pos < s.body_end) out = s.canonical;
  }
  return out;
}

}  // namespace

Doc scan(const std::string& source) {
  Doc doc;
  doc.source = source;
  doc.has_documentclass = source.find("\\documentclass") != std::string::npos;
  doc.has_begin_document = source.find("\\begin{document}") != std::string::npos;
  doc.has_end_document = source.find("\\end{document}") != std::string::npos;
  doc.has_abstract = source.find("\\begin{abstract}") != std::string::npos;

  // Brace balance over the whole document.
  int depth = 0;
  bool negative = false;
  for (size_t i = 0; i < source.size(); ++i) {
    char c = source[i];
    if ((c == '{' || c == '}') && is_escaped(source, i)) continue;
    if (c == '{') ++depth;
    if (c == '}') {
      --depth;
      if (depth < 0) negative = true;
    }
  }
  doc.braces_balanced = depth == 0 && !negative;

  if (auto t = command_arg(source, "\\title")) doc.title = normalize_ws(*t);
  if (auto a = command_arg(source, "\\author")) {
    std::string body = *a;
    size_t start = 0;
    while (true) {
      size_t pos = body.find("\\and", start);
      std::string part = pos == std::string::npos
                             ? body.substr(start)
                             : body.substr(start, pos - start);
      std::string name = normalize_ws(part);
      if (!name.empty()) doc.authors.push_back(name);
      if (pos == std::string::npos) break;
      start = pos + 4;
    }
  }
  if (auto aff = command_arg(source, "\\affiliation"))
    doc.affiliation = normalize_ws(*aff);
  else if (auto af = command_arg(source, "\\affil"))
    doc.affiliation = normalize_ws(*af);

  // Sections.
  size_t doc_end = source.find("\\end{document}");
  if (doc_end == std::string::npos) doc_end = source.size();
  for (const char* cmd : {"\\section*{", "\\section{"}) {
    for (size_t pos : find_all(source, cmd)) {
      if (is_escaped(source, pos)) continue;
      size_t brace = pos + std::string(cmd).size() - 1;
      auto grp = brace_group(source, brace);
      if (!grp) continue;
      Section s;
      s.heading = normalize_ws(grp->first);
      s.canonical = canonical_section(s.heading);
      s.cmd_start = pos;
      s.body_start = grp->second;
      doc.sections.push_back(std::move(s));
    }
  }
  std::sort(doc.sections.begin(), doc.sections.end(),
            [](const Section& a, const Section& b) {
              return a.cmd_start < b.cmd_start;
            });
  for (size_t i = 0; i < doc.sections.size(); ++i) {
    doc.sections[i].body_end =
        i + 1 < doc.sections.size() ? doc.sections[i + 1].cmd_start : doc_end;
  }

  // Citations: \cite, \citep, \citet, \cite*.
  for (size_t pos : find_all(source, "\\cite")) {
    if (is_escaped(source, pos)) continue;
    size_t i = pos + 5;
    while (i < source.size() &&
           ((source[i] >= 'a' && source[i] <= 'z') || source[i] == '*'))
      ++i;
    if (i >= source.size() || source[i] != '{') continue;
    auto grp = brace_group(source, i);
    if (!grp) continue;
    for (const auto& key : split(grp->first, ',')) {
      std::string k = trim(key);
      if (!k.empty()) doc.cite_keys_in_order.push_back(k);
    }
  }

  // Bibliography.
  doc.has_bibliography =
      source.find("\\begin{thebibliography}") != std::string::npos ||
      source.find("\\bibliography{") != std::string::npos;
  {
    auto bib_positions = find_all(source, "\\bibitem{");
    for (size_t i = 0; i < bib_positions.size(); ++i) {
      size_t pos = bib_positions[i];
      auto grp = brace_group(source, pos + 8);
      if (!grp) continue;
      std::string key = trim(grp->first);
      size_t body_start = grp->second;
      size_t body_end = i + 1 < bib_positions.size() ? bib_positions[i + 1]
                                                     : source.size();
      size_t env_end = source.find("\\end{thebibliography}", body_start);
      if (env_end != std::string::npos && env_end < body_end) body_end = env_end;
      doc.bib_entries[key] =
          normalize_ws(source.substr(body_start, body_end - body_start));
    }
  }

  // Figures and tables.
  for (const char* env : {"figure*", "figure"}) {
    std::string begin = std::string("\\begin{") + env + "}";
    std::string end = std::string("\\end{") + env + "}";
    for (size_t pos : find_all(source, begin)) {
      size_t close = source.find(end, pos);
      if (close == std::string::npos) continue;
      Figure f;
      f.start = pos;
      f.end = close + end.size();
      std::string body = source.substr(pos, f.end - pos);
      if (auto lbl = command_arg(body, "\\label")) f.label = *lbl;
      size_t lin = body.find("%lineage:");
      if (lin == std::string::npos) lin = body.find("% lineage:");
      if (lin != std::string::npos) {
        size_t colon = body.find(':', lin);
        size_t eol = body.find('\n', lin);
        if (eol == std::string::npos) eol = body.size();
        f.lineage = trim(body.substr(colon + 1, eol - colon - 1));
      }
      doc.figures.push_back(std::move(f));
    }
  }
  std::sort(doc.figures.begin(), doc.figures.end(),
            [](const Figure& a, const Figure& b) { return a.start < b.start; });
  doc.table_count = static_cast<int>(find_all(source, "\\begin{table").size());

  // Red revision markup.
  for (size_t pos : find_all(source, "\\textcolor{red}{")) {
    if (is_escaped(source, pos)) continue;
    auto grp = brace_group(source, pos + 15);
    if (!grp) continue;
    RedSpan span;
    span.start = pos;
    span.end = grp->second;
    span.content = grp->first;
    doc.red_spans.push_back(std::move(span));
  }
  std::sort(doc.red_spans.begin(), doc.red_spans.end(),
            [](const RedSpan& a, const RedSpan& b) { return a.start < b.start; });

  for (auto& f : doc.figures) f.section = containing_section(doc.sections, f.start);
  for (auto& r : doc.red_spans) r.section = containing_section(doc.sections, r.start);
  return doc;
}

const Section* Doc::find_section(const std::string& canonical) const {
  for (const auto& s : sections)
    if (s.canonical == canonical) return &s;
  return nullptr;
}

std::string Doc::section_body(const Section& s) const {
  return source.substr(s.body_start, s.body_end - s.body_start);
}

std::vector<std::string> Doc::section_skeleton() const {
  std::vector<std::string> out;
  for (const auto& s : sections) out.push_back(s.canonical);
  return out;
}

std::map<std::string, int> Doc::cite_key_counts() const {
  std::map<std::string, int> out;
  for (const auto& k : cite_keys_in_order) out[k] += 1;
  return out;
}

std::string strip_red_markup(const std::string& source) {
  std::string out;
  out.reserve(source.size());
  size_t pos = 0;
  while (pos < source.size()) {
    size_t mark = source.find("\\textcolor{red}{", pos);
    if (mark == std::string::npos || is_escaped(source, mark)) {
      if (mark != std::string::npos && is_escaped(source, mark)) {
        out += source.substr(pos, mark + 1 - pos);
        pos = mark + 1;
        continue;
      }
      out += source.substr(pos);
      break;
    }
    out += source.substr(pos, mark - pos);
    auto grp = brace_group(source, mark + 15);
    if (!grp) {  // unbalanced; keep the rest untouched
      out += source.substr(mark);
      break;
    }
    pos = grp->second;
  }
  return out;
}

}  // namespace confpipe::latex
