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

// Validation of the two revision-loop outputs: the red-marked revised
// manuscript and the comment-mapped response letter. Pure validators; no
// generation happens here.

#include <map>
#include <string>
#include <vector>

#include "confpipe/review.hpp"

namespace confpipe::revision {

struct MarkupSpan {
  std::string section;  // canonical containing section
  size_t start = 0;     // char range in revised_source
  size_t end = 0;
  std::string inserted_text;
};

struct RevisionBundle {
  std::string original_source;
  std::string revised_source;
  std::vector<MarkupSpan> markup_spans;
  std::map<std::string, double> expansion_by_section;
};

// Structural validation: section skeletons must match, no figure, table or
// citation present in the original may be lost, and every substantive
// insertion must sit inside \textcolor{red}{...} markup (checked by
// stripping the markup and comparing against the original modulo
// whitespace). Errors carry one detail item per violation.
RevisionBundle validate_markup(const std::string& original,
                               const std::string& revised);

struct ExpansionReport {
  std::map<std::string, double> ratios;  // section -> (rev-orig)/orig
  std::vector<std::string> warnings;     // target sections outside the band
  std::vector<std::string> undefined;    // empty original sections
};

inline constexpr double kExpansionBandLow = 0.15;
inline constexpr double kExpansionBandHigh = 0.45;

// Per-section growth ratios; warnings (not errors) for target sections
// outside [0.15, 0.45].
ExpansionReport measure_expansion(const RevisionBundle& bundle,
                                  const std::vector<std::string>& target_sections);

struct BulletViolation {
  std::string section;
  size_t position = 0;
  std::string environment;  // "itemize" | "enumerate"
};

// Bullet lists are banned inside inserted spans only; the untouched
// original may legitimately contain lists.
std::vector<BulletViolation> check_no_bullets(const RevisionBundle& bundle);

enum class EntryStatus { fully_addressed, partially_addressed, not_applicable };

std::string entry_status_name(EntryStatus s);

struct LetterEntry {
  std::string reviewer;  // "R1" | "R2"
  EntryStatus status{};
  std::string section_ref;
  std::string comment_excerpt;
  std::string rationale;
};

struct ResponseLetter {
  std::vector<LetterEntry> entries;
};

// Parses the machine-readable table block: one entry per line,
// reviewer<TAB>status<TAB>section_ref<TAB>excerpt[<TAB>rationale].
ResponseLetter parse_response_letter(const std::string& text);

struct LetterReport {
  bool pass = false;
  std::vector<std::string> unmapped_comments;   // major comments with no entry
  std::vector<std::string> dangling_sections;   // section_refs not in revised
  std::vector<std::string> unedited_sections;   // fully_addressed without a span
};

// Passes iff every R1 major flaw and R2 weakness is quoted by at least one
// entry (whitespace-normalized substring match), every section_ref resolves
// in the revised source, and every fully_addressed entry points at a
// section containing at least one markup span.
LetterReport validate_response_letter(const ResponseLetter& letter,
                                      const review::ReviewR1& r1,
                                      const review::ReviewR2& r2,
                                      const RevisionBundle& bundle);

}  // namespace confpipe::revision
