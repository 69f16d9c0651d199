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

#include "confpipe/camera_ready.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <random>
#include <sstream>

#include <json.hpp>

#include "confpipe/digest.hpp"
#include "confpipe/error.hpp"
#include "confpipe/latex.hpp"
#include "confpipe/strings.hpp"

namespace confpipe::camera {

bool CameraReadyReport::all_pass() const {
  if (checks.size() != check_names().size()) return false;
  for (const auto& [name, result] : checks)
    if (!result.pass) return false;
  return true;
}

std::string CameraReadyReport::summary() const {
  std::vector<std::string> parts;
  for (const auto& name : check_names()) {
    auto it = checks.find(name);
    parts.push_back(name + "=" +
                    (it != checks.end() && it->second.pass ? "pass" : "fail"));
  }
  return join(parts, ";");
}

CheckResult check_latex_conformity(const std::string& source) {
  auto doc = latex::scan(source);
  CheckResult out;
  if (!doc.has_documentclass) out.details.push_back("missing \\documentclass");
  if (!doc.has_begin_document) out.details.push_back("missing \\begin{document}");
  if (!doc.has_end_document) out.details.push_back("missing \\end{document}");
  if (!doc.braces_balanced) out.details.push_back("unbalanced braces");
  if (doc.title.empty()) out.details.push_back("missing \\title");
  out.pass = out.details.empty();
  return out;
}

CheckResult check_sections(const std::string& source) {
  auto doc = latex::scan(source);
  CheckResult out;
  auto skeleton = doc.section_skeleton();
  auto has_section = [&](const std::string& canonical) {
    return std::find(skeleton.begin(), skeleton.end(), canonical) !=
           skeleton.end();
  };
  for (const auto& required : required_sections()) {
    bool present;
    if (required == "abstract") {
      present = doc.has_abstract || has_section("abstract");
    } else if (required == "references") {
      present = doc.has_bibliography || has_section("references");
    } else {
      present = has_section(required);
    }
    if (!present) out.details.push_back(required);
  }
  out.pass = out.details.empty();
  return out;
}

namespace {

bool has_identifier(const std::string& entry_body) {
  std::string body = to_lower(entry_body);
  if (body.find("doi") != std::string::npos) return true;
  if (body.find("arxiv") != std::string::npos) return true;
  if (body.find("http://") != std::string::npos ||
      body.find("https://") != std::string::npos)
    return true;
  // Bare DOI form: "10.<digits>/"
  size_t pos = 0;
  while ((pos = body.find("10.", pos)) != std::string::npos) {
    size_t i = pos + 3;
    int digits = 0;
    while (i < body.size() && std::isdigit(static_cast<unsigned char>(body[i]))) {
      ++digits;
      ++i;
    }
    if (digits >= 4 && i < body.size() && body[i] == '/') return true;
    pos += 3;
  }
  return false;
}

}  // namespace

CheckResult check_citations(const std::string& source) {
  auto doc = latex::scan(source);
  CheckResult out;
  std::set<std::string> reported;
  for (const auto& key : doc.cite_keys_in_order) {
    if (!doc.bib_entries.count(key) && reported.insert(key).second)
      out.details.push_back("unresolved citation: " + key);
  }
  auto cited = doc.cite_key_counts();
  for (const auto& [key, body] : doc.bib_entries) {
    if (!has_identifier(body))
      out.details.push_back("entry without DOI/arXiv/URL identifier: " + key);
    if (!cited.count(key))
      out.warnings.push_back("unreferenced bibliography entry: " + key);
  }
  out.pass = out.details.empty();
  return out;
}

CheckResult check_figure_lineage(const std::string& source,
                                 const DatasetRecord* dataset) {
  auto doc = latex::scan(source);
  CheckResult out;
  int index = 0;
  for (const auto& fig : doc.figures) {
    ++index;
    std::string where =
        fig.label.empty() ? "figure #" + std::to_string(index) : fig.label;
    if (fig.lineage.empty()) {
      out.details.push_back("untagged figure: " + where);
      continue;
    }
    if (fig.lineage == "dataset") {
      if (!dataset)
        out.details.push_back("figure " + where +
                              " claims dataset lineage but no dataset is registered");
      continue;
    }
    if (starts_with(fig.lineage, "cited:")) {
      std::string key = trim(fig.lineage.substr(6));
      if (!doc.bib_entries.count(key))
        out.details.push_back("figure " + where +
                              " cites missing bibliography key: " + key);
      continue;
    }
    out.details.push_back("figure " + where + " carries malformed lineage tag: " +
                          fig.lineage);
  }
  out.pass = out.details.empty();
  return out;
}

// ---------------------------------------------------------------------------
// Watermark
// ---------------------------------------------------------------------------

namespace {
constexpr const char* kWatermarkComment = "% watermark: ";
constexpr const char* kWatermarkVisible = "\\noindent{\\footnotesize ";

std::string remove_watermark(const std::string& source) {
  std::string out;
  for (const auto& line : split(source, '\n')) {
    if (starts_with(line, kWatermarkComment)) continue;
    if (starts_with(line, kWatermarkVisible) &&
        line.find(" | ") != std::string::npos)
      continue;
    out += line;
    out += '\n';
  }
  if (!source.empty() && source.back() != '\n' && !out.empty()) out.pop_back();
  return out;
}
}  // namespace

std::string apply_watermark(const std::string& source,
                            const std::string& paper_id, Track track,
                            const std::string& build_time_iso) {
  std::string fields =
      paper_id + " | " + track_code(track) + " | " + build_time_iso;
  std::string block = std::string(kWatermarkComment) + fields + "\n" +
                      kWatermarkVisible + fields + "}\n";
  std::string clean = remove_watermark(source);
  size_t end_doc = clean.rfind("\\end{document}");
  if (end_doc == std::string::npos) return clean + block;
  std::string out = clean;
  out.insert(end_doc, block);
  return out;
}

std::optional<Watermark> extract_watermark(const std::string& source) {
  size_t pos = source.find(kWatermarkComment);
  if (pos == std::string::npos) return std::nullopt;
  size_t eol = source.find('\n', pos);
  if (eol == std::string::npos) eol = source.size();
  std::string fields = source.substr(pos + std::string(kWatermarkComment).size(),
                                     eol - pos - std::string(kWatermarkComment).size());
  std::vector<std::string> parts;
  size_t start = 0;
  while (true) {
    size_t sep = fields.find(" | ", start);
    if (sep == std::string::npos) {
      parts.push_back(trim(fields.substr(start)));
      break;
    }
    parts.push_back(trim(fields.substr(start, sep - start)));
    start = sep + 3;
  }
  if (parts.size() != 3) return std::nullopt;
  return Watermark{parts[0], parts[1], parts[2]};
}

CheckResult check_watermark(const std::string& source,
                            const std::string& paper_id, Track track) {
  CheckResult out;
  auto wm = extract_watermark(source);
  if (!wm) {
    out.details.push_back("no watermark present");
    return out;
  }
  if (wm->paper_id != paper_id)
    out.details.push_back("watermark paper id mismatch: " + wm->paper_id);
  if (wm->track_code != track_code(track))
    out.details.push_back("watermark track code mismatch: " + wm->track_code);
  if (wm->timestamp.empty())
    out.details.push_back("watermark missing timestamp");
  // The visible footer must carry the same fields as the comment.
  if (source.find(std::string(kWatermarkVisible) + wm->paper_id) ==
      std::string::npos)
    out.details.push_back("visible watermark footer missing");
  out.pass = out.details.empty();
  return out;
}

// ---------------------------------------------------------------------------
// Author consistency
// ---------------------------------------------------------------------------

CheckResult check_author_consistency(const std::string& source,
                                     const std::string& metadata_json,
                                     const AuthorSet& ledger_authors) {
  CheckResult out;
  if (!ledger_authors.locked) {
    out.details.push_back("ledger author set is not locked");
    return out;
  }
  std::vector<std::string> expected;
  for (const auto& a : ledger_authors.authors) expected.push_back(a.name);

  auto doc = latex::scan(source);
  if (doc.authors != expected)
    out.details.push_back("authors (manuscript) differ from ledger");
  if (normalize_ws(doc.affiliation) != normalize_ws(ledger_authors.institution))
    out.details.push_back("institution (manuscript) differs from ledger");

  auto meta = nlohmann::json::parse(metadata_json, nullptr, false);
  if (meta.is_discarded()) {
    out.details.push_back("metadata sidecar is not valid JSON");
  } else {
    std::vector<std::string> meta_authors;
    if (meta.contains("authors") && meta["authors"].is_array()) {
      for (const auto& a : meta["authors"]) {
        if (a.is_object() && a.contains("name"))
          meta_authors.push_back(a["name"].get<std::string>());
      }
    }
    if (meta_authors != expected)
      out.details.push_back("authors (metadata) differ from ledger");
    std::string meta_inst =
        meta.contains("institution") && meta["institution"].is_string()
            ? meta["institution"].get<std::string>()
            : "";
    if (normalize_ws(meta_inst) != normalize_ws(ledger_authors.institution))
      out.details.push_back("institution (metadata) differs from ledger");
  }
  out.pass = out.details.empty();
  return out;
}

CameraReadyReport run_all_checks(const std::string& source,
                                 const std::string& paper_id, Track track,
                                 const DatasetRecord* dataset,
                                 const std::string& metadata_json,
                                 const AuthorSet& ledger_authors) {
  CameraReadyReport report;
  report.checks["latex_conformity"] = check_latex_conformity(source);
  report.checks["sections_complete"] = check_sections(source);
  report.checks["citation_integrity"] = check_citations(source);
  report.checks["figure_lineage"] = check_figure_lineage(source, dataset);
  report.checks["watermark_present"] = check_watermark(source, paper_id, track);
  report.checks["author_consistency"] =
      check_author_consistency(source, metadata_json, ledger_authors);
  return report;
}

// ---------------------------------------------------------------------------
// Fictional authorship
// ---------------------------------------------------------------------------

std::vector<NamePoolEntry> load_name_pool(const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in) throw Error("storage", "cannot read name pool " + file.string());
  std::vector<NamePoolEntry> pool;
  std::string line;
  while (std::getline(in, line)) {
    std::string t = trim(line);
    if (t.empty() || t[0] == '#') continue;
    auto tab = t.find('\t');
    if (tab == std::string::npos) {
      pool.push_back({t, ""});
    } else {
      pool.push_back({trim(t.substr(0, tab)), trim(t.substr(tab + 1))});
    }
  }
  return pool;
}

std::vector<std::string> load_token_file(const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in) throw Error("storage", "cannot read token file " + file.string());
  std::vector<std::string> tokens;
  std::string line;
  while (std::getline(in, line)) {
    std::string t = trim(line);
    if (!t.empty() && t[0] != '#') tokens.push_back(t);
  }
  return tokens;
}

AuthorSet assign_fictional_authors(const std::vector<NamePoolEntry>& pool,
                                   const std::vector<std::string>& universe_tokens,
                                   const std::vector<std::string>& form_tokens,
                                   const std::set<std::string>& denylist,
                                   uint64_t seed, const std::string& paper_id,
                                   const std::set<std::string>& prior_assignments) {
  auto track = paper_id_track(paper_id);
  if (!track) throw Error("bad_paper_id", "not a paper id: " + paper_id);
  int nn = paper_id_number(paper_id);
  if (pool.size() < 3)
    throw Error("pool_exhausted", "name pool smaller than one author set");
  if (universe_tokens.empty() || form_tokens.empty())
    throw Error("bad_pool", "institution token lists are empty");

  std::set<std::string> deny_lc;
  for (const auto& d : denylist) deny_lc.insert(to_lower(normalize_ws(d)));

  // Seed-shuffled pool, partitioned into per-track regions; each paper owns
  // a fixed 3-name slot inside its region. Assignment is therefore a pure
  // function of (pool, seed, paper_id) and cannot collide across papers.
  std::vector<size_t> order(pool.size());
  for (size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::mt19937_64 rng(seed ^ 0x9e3779b97f4a7c15ULL);
  std::shuffle(order.begin(), order.end(), rng);

  size_t region_size = pool.size() / kTrackCount;
  size_t region_start =
      static_cast<size_t>(track_number(*track) - 1) * region_size;
  size_t slot_start = region_start + static_cast<size_t>(nn - 1) * 3;
  if (slot_start + 3 > region_start + region_size)
    throw Error("pool_exhausted", "name pool region for track " +
                                      track_name(*track) + " exhausted at " +
                                      paper_id);

  std::string h = sha256_hex(std::to_string(seed) + ":" + paper_id);
  int n_authors = 2 + ((h[0] % 2 + 2) % 2);

  AuthorSet out;
  out.seed = seed;
  int taken = 0;
  for (size_t i = slot_start; i < slot_start + 3 && taken < n_authors; ++i) {
    const NamePoolEntry& entry = pool[order[i]];
    if (deny_lc.count(to_lower(normalize_ws(entry.name)))) continue;  // bounded: skip within slot
    if (prior_assignments.count(entry.name))
      throw Error("name_reused",
                  "name already assigned to another paper: " + entry.name);
    out.authors.push_back({entry.name, entry.origin_tag});
    ++taken;
  }
  if (taken < 2)
    throw Error("denylist_hit",
                "could not assemble two clean author names for " + paper_id);

  // Institution = <fictional-universe token> <institution-form token>,
  // resampled a bounded number of times on denylist hits.
  size_t u = static_cast<size_t>(static_cast<unsigned char>(h[1]));
  size_t f = static_cast<size_t>(static_cast<unsigned char>(h[2]));
  bool found = false;
  for (int attempt = 0; attempt < 8; ++attempt) {
    std::string candidate = universe_tokens[(u + attempt) % universe_tokens.size()] +
                            " " + form_tokens[(f + attempt) % form_tokens.size()];
    if (!deny_lc.count(to_lower(normalize_ws(candidate)))) {
      out.institution = candidate;
      found = true;
      break;
    }
  }
  if (!found)
    throw Error("denylist_hit",
                "institution composition kept hitting the denylist for " + paper_id);

  out.locked = true;
  return out;
}

std::string metadata_sidecar_json(const std::string& paper_id,
                                  const std::string& title,
                                  const AuthorSet& authors, Track track,
                                  const std::string& watermark_time) {
  nlohmann::ordered_json j;
  j["paper_id"] = paper_id;
  j["title"] = title;
  nlohmann::ordered_json arr = nlohmann::ordered_json::array();
  for (const auto& a : authors.authors)
    arr.push_back({{"name", a.name}, {"origin_tag", a.origin_tag}});
  j["authors"] = arr;
  j["institution"] = authors.institution;
  j["track"] = track_name(track);
  j["watermark_time"] = watermark_time;
  return j.dump(2);
}

std::string apply_author_header(const std::string& source,
                                const AuthorSet& authors) {
  std::vector<std::string> names;
  for (const auto& a : authors.authors) names.push_back(a.name);
  std::string header = "\\author{" + join(names, " \\and ") + "}\n" +
                       "\\affiliation{" + authors.institution + "}\n";

  // Drop any existing author/affiliation commands, then place the header
  // right after \title{...}.
  std::string clean;
  for (const auto& line : split(source, '\n')) {
    if (starts_with(trim(line), "\\author{") ||
        starts_with(trim(line), "\\affiliation{"))
      continue;
    clean += line;
    clean += '\n';
  }
  if (!source.empty() && source.back() != '\n' && !clean.empty())
    clean.pop_back();

  size_t title_pos = clean.find("\\title{");
  if (title_pos == std::string::npos) return header + clean;
  auto grp = latex::brace_group(clean, title_pos + 6);
  size_t insert_at = grp ? grp->second : clean.find('\n', title_pos);
  if (insert_at == std::string::npos) return clean + "\n" + header;
  // Move past the newline ending the \title line.
  while (insert_at < clean.size() && clean[insert_at] != '\n') ++insert_at;
  std::string out = clean;
  out.insert(insert_at + 1, header);
  return out;
}

}  // namespace confpipe::camera
