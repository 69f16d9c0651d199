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

// The final verification gate before presentation stages: template
// conformity, section completeness, citation integrity, figure lineage,
// watermarking and fictional author/institution attribution. All checks are
// source-level; nothing here renders a PDF.

#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "confpipe/types.hpp"

namespace confpipe::camera {

struct CheckResult {
  bool pass = false;
  std::vector<std::string> details;   // failures
  std::vector<std::string> warnings;  // non-fatal findings
};

// Six checks; promotion to CameraReady is allowed iff all pass.
struct CameraReadyReport {
  std::map<std::string, CheckResult> checks;
  bool all_pass() const;
  std::string summary() const;  // "latex_conformity=pass;..." for event logs
};

inline const std::vector<std::string>& check_names() {
  static const std::vector<std::string> kNames{
      "latex_conformity",  "sections_complete", "citation_integrity",
      "figure_lineage",    "watermark_present", "author_consistency"};
  return kNames;
}

CheckResult check_latex_conformity(const std::string& source);

// The six required sections; "Methods" counts for methodology via the alias
// table, a bibliography environment counts for references.
inline const std::vector<std::string>& required_sections() {
  static const std::vector<std::string> kSections{
      "abstract",  "introduction", "methodology",
      "results",   "discussion",   "references"};
  return kSections;
}
CheckResult check_sections(const std::string& source);

// (a) cite keys with no bibliography entry and (b) entries lacking a
// DOI/arXiv/URL identifier fail; unreferenced entries only warn.
CheckResult check_citations(const std::string& source);

// Every figure environment must carry `%lineage: dataset` or
// `%lineage: cited:<key>` with the key resolving in the bibliography.
// `dataset` lineage requires a registered dataset record.
CheckResult check_figure_lineage(const std::string& source,
                                 const DatasetRecord* dataset);

struct Watermark {
  std::string paper_id;
  std::string track_code;
  std::string timestamp;
};

// Deterministic watermark: a footer comment plus visible footer text
// carrying paper id, track code and build time. Re-application replaces the
// previous watermark.
std::string apply_watermark(const std::string& source,
                            const std::string& paper_id, Track track,
                            const std::string& build_time_iso);
std::optional<Watermark> extract_watermark(const std::string& source);
CheckResult check_watermark(const std::string& source,
                            const std::string& paper_id, Track track);

// Exact author names and institution must agree across the manuscript
// header, the metadata sidecar and the ledger record.
CheckResult check_author_consistency(const std::string& source,
                                     const std::string& metadata_json,
                                     const AuthorSet& ledger_authors);

CameraReadyReport run_all_checks(const std::string& source,
                                 const std::string& paper_id, Track track,
                                 const DatasetRecord* dataset,
                                 const std::string& metadata_json,
                                 const AuthorSet& ledger_authors);

// ---------------------------------------------------------------------------
// Fictional authorship
// ---------------------------------------------------------------------------

struct NamePoolEntry {
  std::string name;
  std::string origin_tag;
};

// UTF-8 text, one `name<TAB>origin_tag` per line, # comments allowed.
std::vector<NamePoolEntry> load_name_pool(const std::filesystem::path& file);
// One token per line, # comments allowed.
std::vector<std::string> load_token_file(const std::filesystem::path& file);

// Deterministic for (seed, paper_id): papers draw from disjoint slices of a
// seed-shuffled pool, so assignments never collide across papers regardless
// of the order papers reach this stage. prior_assignments is verified, not
// consumed. Errors: pool_exhausted; denylist_hit after bounded resampling.
AuthorSet assign_fictional_authors(const std::vector<NamePoolEntry>& pool,
                                   const std::vector<std::string>& universe_tokens,
                                   const std::vector<std::string>& form_tokens,
                                   const std::set<std::string>& denylist,
                                   uint64_t seed, const std::string& paper_id,
                                   const std::set<std::string>& prior_assignments);

// {paper_id, title, authors[], institution, track, watermark_time}
std::string metadata_sidecar_json(const std::string& paper_id,
                                  const std::string& title,
                                  const AuthorSet& authors, Track track,
                                  const std::string& watermark_time);

// Injects \author{...} and \affiliation{...} after \title, replacing any
// existing ones.
std::string apply_author_header(const std::string& source,
                                const AuthorSet& authors);

}  // namespace confpipe::camera
