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

#include "confpipe/revision.hpp"

#include <set>

#include "confpipe/error.hpp"
#include "confpipe/latex.hpp"
#include "confpipe/strings.hpp"

namespace confpipe::revision {

RevisionBundle validate_markup(const std::string& original,
                               const std::string& revised) {
  auto odoc = latex::scan(original);
  auto rdoc = latex::scan(revised);
  std::vector<std::string> problems;

  if (odoc.sections.empty())
    problems.push_back("original has no section commands");
  if (rdoc.sections.empty())
    problems.push_back("revised has no section commands");

  if (odoc.section_skeleton() != rdoc.section_skeleton()) {
    problems.push_back("section skeleton mismatch: original [" +
                       join(odoc.section_skeleton(), ", ") + "] vs revised [" +
                       join(rdoc.section_skeleton(), ", ") + "]");
  }

  // Nothing cited, drawn, or tabulated in the original may disappear.
  auto rkeys = rdoc.cite_key_counts();
  std::set<std::string> seen;
  for (const auto& key : odoc.cite_keys_in_order) {
    if (!rkeys.count(key) && seen.insert(key).second)
      problems.push_back("citation lost in revision: " + key);
  }
  if (rdoc.figures.size() < odoc.figures.size())
    problems.push_back("figure environment lost in revision");
  if (rdoc.table_count < odoc.table_count)
    problems.push_back("table environment lost in revision");

  // Substantive edits must be red-marked: stripping the markup has to give
  // back the original, modulo whitespace.
  if (normalize_ws(latex::strip_red_markup(revised)) != normalize_ws(original))
    problems.push_back(
        "unmarked insertion: revised text differs outside \\textcolor{red} markup");

  if (!problems.empty())
    throw Error("bad_revision", "revised manuscript failed structural checks",
                problems);

  RevisionBundle bundle;
  bundle.original_source = original;
  bundle.revised_source = revised;
  for (const auto& span : rdoc.red_spans) {
    bundle.markup_spans.push_back(
        {span.section, span.start, span.end, span.content});
  }

  // Per-section growth, computed once here so callers get it with the bundle.
  for (const auto& osec : odoc.sections) {
    const latex::Section* rsec = rdoc.find_section(osec.canonical);
    if (!rsec) continue;
    double olen = static_cast<double>(normalize_ws(odoc.section_body(osec)).size());
    double rlen = static_cast<double>(normalize_ws(rdoc.section_body(*rsec)).size());
    if (olen > 0.0)
      bundle.expansion_by_section[osec.canonical] = (rlen - olen) / olen;
  }
  return bundle;
}

ExpansionReport measure_expansion(const RevisionBundle& bundle,
                                  const std::vector<std::string>& target_sections) {
  ExpansionReport report;
  auto odoc = latex::scan(bundle.original_source);
  auto rdoc = latex::scan(bundle.revised_source);
  for (const auto& osec : odoc.sections) {
    const latex::Section* rsec = rdoc.find_section(osec.canonical);
    if (!rsec) continue;
    double olen = static_cast<double>(normalize_ws(odoc.section_body(osec)).size());
    double rlen = static_cast<double>(normalize_ws(rdoc.section_body(*rsec)).size());
    if (olen == 0.0) {
      report.undefined.push_back(osec.canonical);
      continue;
    }
    report.ratios[osec.canonical] = (rlen - olen) / olen;
  }
  for (const auto& target : target_sections) {
    auto it = report.ratios.find(target);
    if (it == report.ratios.end()) continue;
    if (it->second < kExpansionBandLow || it->second > kExpansionBandHigh) {
      report.warnings.push_back(target + " grew by " +
                                format_score(it->second * 100.0) +
                                "%, outside the expected revision band");
    }
  }
  return report;
}

std::vector<BulletViolation> check_no_bullets(const RevisionBundle& bundle) {
  std::vector<BulletViolation> out;
  for (const auto& span : bundle.markup_spans) {
    for (const char* env : {"itemize", "enumerate"}) {
      std::string needle = std::string("\\begin{") + env + "}";
      size_t pos = span.inserted_text.find(needle);
      if (pos != std::string::npos) {
        out.push_back({span.section, span.start + pos, env});
      }
    }
  }
  return out;
}

std::string entry_status_name(EntryStatus s) {
  switch (s) {
    case EntryStatus::fully_addressed: return "fully_addressed";
    case EntryStatus::partially_addressed: return "partially_addressed";
    case EntryStatus::not_applicable: return "not_applicable";
  }
  return "not_applicable";
}

namespace {

std::optional<EntryStatus> status_from_name(const std::string& s) {
  if (s == "fully_addressed") return EntryStatus::fully_addressed;
  if (s == "partially_addressed") return EntryStatus::partially_addressed;
  if (s == "not_applicable") return EntryStatus::not_applicable;
  return std::nullopt;
}

}  // namespace

ResponseLetter parse_response_letter(const std::string& text) {
  ResponseLetter letter;
  std::vector<std::string> problems;
  int line_no = 0;
  for (const auto& line : split(text, '\n')) {
    ++line_no;
    auto fields = split(line, '\t');
    if (fields.size() < 4) continue;
    std::string reviewer = trim(fields[0]);
    if (reviewer != "R1" && reviewer != "R2") continue;
    auto status = status_from_name(trim(fields[1]));
    if (!status) {
      problems.push_back("line " + std::to_string(line_no) +
                         ": unknown status '" + trim(fields[1]) + "'");
      continue;
    }
    LetterEntry entry;
    entry.reviewer = reviewer;
    entry.status = *status;
    entry.section_ref = trim(fields[2]);
    entry.comment_excerpt = trim(fields[3]);
    if (fields.size() > 4) entry.rationale = trim(fields[4]);
    letter.entries.push_back(std::move(entry));
  }
  if (!problems.empty())
    throw Error("bad_letter", "response letter table failed to parse", problems);
  return letter;
}

LetterReport validate_response_letter(const ResponseLetter& letter,
                                      const review::ReviewR1& r1,
                                      const review::ReviewR2& r2,
                                      const RevisionBundle& bundle) {
  LetterReport report;
  auto rdoc = latex::scan(bundle.revised_source);

  std::set<std::string> sections_with_spans;
  for (const auto& span : bundle.markup_spans)
    sections_with_spans.insert(span.section);

  // Substring matching after whitespace normalization; no fuzzy matching.
  auto covered = [&](const std::string& comment, const std::string& reviewer) {
    std::string norm_comment = normalize_ws(comment);
    for (const auto& e : letter.entries) {
      if (e.reviewer != reviewer || e.comment_excerpt.empty()) continue;
      if (norm_comment.find(normalize_ws(e.comment_excerpt)) != std::string::npos)
        return true;
    }
    return false;
  };

  for (const auto& flaw : r1.major_flaws)
    if (!covered(flaw, "R1")) report.unmapped_comments.push_back("R1: " + flaw);
  for (const auto& weakness : r2.weaknesses)
    if (!covered(weakness, "R2"))
      report.unmapped_comments.push_back("R2: " + weakness);

  for (const auto& e : letter.entries) {
    if (!rdoc.find_section(latex::canonical_section(e.section_ref))) {
      report.dangling_sections.push_back(e.section_ref);
      continue;
    }
    if (e.status == EntryStatus::fully_addressed &&
        !sections_with_spans.count(latex::canonical_section(e.section_ref))) {
      report.unedited_sections.push_back(e.section_ref);
    }
  }

  report.pass = report.unmapped_comments.empty() &&
                report.dangling_sections.empty() &&
                report.unedited_sections.empty();
  return report;
}

}  // namespace confpipe::revision
